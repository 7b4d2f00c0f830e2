from periodic_stokes.cli.app import build_parser, main
from periodic_stokes.cli.commands import COMMANDS, RunOptions
from periodic_stokes.cli.run_config import RunConfig, load_run_config, parse_run_config

__all__ = [
    "COMMANDS",
    "RunConfig",
    "RunOptions",
    "build_parser",
    "load_run_config",
    "main",
    "parse_run_config",
]
