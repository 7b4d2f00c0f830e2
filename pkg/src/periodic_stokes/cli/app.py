import argparse
import logging
import sys
from collections.abc import Sequence

from pydantic import ValidationError

from periodic_stokes.cli.commands import COMMANDS, RunOptions
from periodic_stokes.cli.run_config import RunConfig, load_run_config
from periodic_stokes.config import load_settings
from periodic_stokes.exceptions import (
    CompatibilityError,
    ConfigError,
    GridError,
    StokesError,
)

logger = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_COMPATIBILITY = 3


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits, got {value}")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"resolution scale must be positive, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="periodic-stokes",
        description="Time-periodic Stokes flow in the half-space: solve, verify, sweep, audit.",
    )
    subcommands = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub = subcommands.add_parser(name)
        sub.add_argument("--config", required=True, help="Run configuration (TOML).")
        sub.add_argument("--out", default=None, help="Output directory (default: out).")
        sub.add_argument("--seed", type=_u64, default=None, help="Overrides the config seed.")
        sub.add_argument(
            "--perturb-q0",
            action="store_true",
            help="Flip the sign of the tangential boundary pressure term (fault injection).",
        )
        sub.add_argument(
            "--resolution-scale",
            type=_positive,
            default=1,
            help="Integer multiplier applied to the time and tangential mode counts.",
        )
    return parser


def _resolve(args: argparse.Namespace) -> tuple[RunConfig, RunOptions]:
    config = load_run_config(args.config)
    if config.action is not None and config.action != args.command:
        raise ConfigError(
            f"Configuration `action` is {config.action!r} but the command is {args.command!r}"
        )
    if args.seed is not None:
        config = config.model_copy(update={"seed": args.seed})
    run = RunOptions(
        out=args.out or config.output or "out",
        perturb_q0=args.perturb_q0,
        resolution_scale=args.resolution_scale,
    )
    try:
        grid = config.problem.grid(run.resolution_scale)
    except GridError as e:
        raise ConfigError(f"Invalid problem block: {e}") from e
    logger.info(f"Grid {grid.describe()}")
    return config, run


def main(argv: Sequence[str] | None = None) -> int:
    settings = load_settings()
    logging.basicConfig(
        level=settings.LOG_LEVEL,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        config, run = _resolve(args)
        logger.info(f"Running {args.command} with {settings.THREADS} FFT worker(s)")
        return COMMANDS[args.command](config, run)
    except (ConfigError, ValidationError) as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except CompatibilityError as e:
        logger.error(f"Incompatible data at k={e.frequencies}: {e}")
        return EXIT_COMPATIBILITY
    except StokesError as e:
        logger.exception(f"{args.command} failed: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
