"""
Run configuration: a versioned TOML file validated into frozen models.

Unknown keys are errors at every level. Relative data paths are resolved against the
directory of the configuration file.
"""

from __future__ import annotations

import hashlib
import logging
import math
import pathlib
import tomllib
from typing import Literal, Self

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from periodic_stokes.exceptions import ConfigError
from periodic_stokes.spectral_core import TorusPlaneGrid
from periodic_stokes.spectral_core.grid import Grading
from periodic_stokes.verification import CATALOGUE, SUITES, SuiteConfig, Tolerances
from periodic_stokes.verification.estimates import EstimateKind

logger = logging.getLogger(__name__)

type Action = Literal["solve", "verify", "sweep", "besov", "symbols-audit"]

CONFIG_VERSION = 1
GENERATORS = ("random", "files", *CATALOGUE)
AUDIT_SYMBOLS = (
    "M",
    "M1",
    "M2",
    "parabolic_profile_0",
    "parabolic_profile_1",
    "tangential_profile_0",
    "tangential_profile_1",
)


class _Block(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class ProblemBlock(_Block):
    """Problem and resolution parameters."""

    tau: float = Field(2.0 * math.pi, gt=0)
    n: int = Field(2, ge=2)
    q: float = Field(2.0, gt=1.0)
    time_modes: int = Field(16, ge=1, description="K; the time lattice has 2K + 1 samples.")
    tangential_modes: int = Field(64, ge=2, description="N samples per tangential axis.")
    length: float = Field(2.0 * math.pi, gt=0)
    x_max: float = Field(20.0, gt=0)
    nodes: int = Field(128, ge=3)
    grading: Grading = "graded"
    ratio: float = Field(1.08, gt=1.0)

    def grid(self, resolution_scale: int = 1) -> TorusPlaneGrid:
        return TorusPlaneGrid.create(
            tau=self.tau,
            n=self.n,
            time_modes=self.time_modes * resolution_scale,
            tangential_modes=self.tangential_modes * resolution_scale,
            length=self.length,
            x_max=self.x_max,
            nodes=self.nodes,
            grading=self.grading,
            ratio=self.ratio,
        )


class DataBlock(_Block):
    """
    Where the data come from: a manufactured recipe, a seeded random bundle, or field
    files for f, g and h.
    """

    generator: str = "composite"
    kind: EstimateKind = Field("oscillatory", description="Kind of a random bundle.")
    f: str | None = None
    g: str | None = None
    h: str | None = None

    @model_validator(mode="after")
    def _check_source(self) -> Self:
        if self.generator not in GENERATORS:
            raise ValueError(
                f"`generator` must be one of {list(GENERATORS)}, got {self.generator!r}"
            )
        paths = (self.f, self.g, self.h)
        if self.generator == "files" and any(p is None for p in paths):
            raise ValueError("`generator = \"files\"` needs the paths `f`, `g` and `h`")
        if self.generator != "files" and any(p is not None for p in paths):
            raise ValueError("Field paths are only read with `generator = \"files\"`")
        return self

    def resolved(self, base: pathlib.Path) -> DataBlock:
        """Paths made absolute against ``base``; every referenced file must exist."""
        if self.generator != "files":
            return self
        update = {}
        for key in ("f", "g", "h"):
            path = base / str(getattr(self, key))
            if not path.is_file():
                raise ConfigError(f"Data file `{key}` not found: {path}")
            update[key] = str(path.resolve())
        return self.model_copy(update=update)


class ToleranceBlock(Tolerances):
    residual: float = Field(1e-8, gt=0, description="Largest accepted solve residual.")


class VerifyBlock(_Block):
    suites: tuple[str, ...] = tuple(SUITES)
    q_values: tuple[float, ...] = (2.0, 4.0)
    partition_points: int = Field(10_000, ge=1)
    oracle_modes: int = Field(200, ge=1)
    oracle_nodes: int = Field(2049, ge=512)
    ensemble_size: int = Field(50, ge=1)
    estimate_time_modes: int = Field(8, ge=4)
    estimate_tangential_modes: int = Field(32, ge=10)
    audit_levels: int = Field(10, ge=3)
    recipes: tuple[str, ...] = tuple(CATALOGUE)

    @model_validator(mode="after")
    def _check_names(self) -> Self:
        unknown = [s for s in self.suites if s not in SUITES]
        unknown += [r for r in self.recipes if r not in CATALOGUE]
        if unknown:
            raise ValueError(f"Unknown suites or recipes: {unknown}")
        return self


class SweepBlock(_Block):
    generator: Literal["random", "zero"] = "random"
    kind: EstimateKind = "oscillatory"
    trials: int = Field(50, ge=1)
    max_index: int = Field(4, ge=1)
    q_values: tuple[float, ...] = (2.0,)
    compare_resolution: bool = True


class BesovBlock(_Block):
    s: float = 0.5
    m: int = Field(1, ge=1)
    shells: tuple[int, ...] = (1, 2)
    fields: tuple[str, ...] = ()

    def resolved(self, base: pathlib.Path) -> BesovBlock:
        paths = [base / name for name in self.fields]
        missing = [str(p) for p in paths if not p.is_file()]
        if missing:
            raise ConfigError(f"Besov field files not found: {missing}")
        return self.model_copy(update={"fields": tuple(str(p.resolve()) for p in paths)})


class AuditBlock(_Block):
    symbols: tuple[str, ...] = AUDIT_SYMBOLS
    levels: int = Field(10, ge=3)
    points_per_octave: int = Field(2, ge=1)
    refine: bool = True

    @model_validator(mode="after")
    def _check_symbols(self) -> Self:
        unknown = [s for s in self.symbols if s not in AUDIT_SYMBOLS]
        if unknown:
            raise ValueError(f"Unknown audit symbols {unknown}; choose from {list(AUDIT_SYMBOLS)}")
        return self


class RunConfig(_Block):
    """A complete run: problem, data source, per-action blocks and tolerances."""

    version: Literal[1]
    action: Action | None = None
    output: str | None = None
    seed: int = Field(0, ge=0, lt=2**64)
    problem: ProblemBlock = Field(default_factory=ProblemBlock)
    data: DataBlock = Field(default_factory=DataBlock)
    tolerances: ToleranceBlock = Field(default_factory=ToleranceBlock)
    verify: VerifyBlock = Field(default_factory=VerifyBlock)
    sweep: SweepBlock = Field(default_factory=SweepBlock)
    besov: BesovBlock = Field(default_factory=BesovBlock)
    audit: AuditBlock = Field(default_factory=AuditBlock)

    def suite_config(self, perturb_q0: bool = False) -> SuiteConfig:
        block = self.verify
        return SuiteConfig(
            q_values=block.q_values,
            seed=self.seed,
            perturb_q0=perturb_q0,
            partition_points=block.partition_points,
            oracle_modes=block.oracle_modes,
            oracle_nodes=block.oracle_nodes,
            ensemble_size=block.ensemble_size,
            estimate_time_modes=block.estimate_time_modes,
            estimate_tangential_modes=block.estimate_tangential_modes,
            audit_levels=block.audit_levels,
            recipes=block.recipes,
            tolerances=Tolerances(**self.tolerances.model_dump(exclude={"residual"})),
        )

    def digest(self) -> str:
        """sha256 of the canonical JSON form of the configuration."""
        return hashlib.sha256(self.model_dump_json().encode("utf-8")).hexdigest()


def parse_run_config(text: str, base: pathlib.Path | None = None) -> RunConfig:
    """
    Validate TOML ``text`` into a ``RunConfig``.

    Raises:
        ConfigError: Malformed TOML, unknown keys, a bad version or a missing data file.
    """
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"Malformed configuration: {e}") from e
    if raw.get("version") != CONFIG_VERSION:
        raise ConfigError(
            f"Configuration `version` must be {CONFIG_VERSION}, got {raw.get('version')!r}"
        )
    try:
        config = RunConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration:\n{e}") from e
    base = base or pathlib.Path.cwd()
    update = {"data": config.data.resolved(base), "besov": config.besov.resolved(base)}
    return config.model_copy(update=update)


def load_run_config(path: str | pathlib.Path) -> RunConfig:
    path = pathlib.Path(path)
    if not path.is_file():
        raise ConfigError(f"Configuration file not found: {path}")
    config = parse_run_config(path.read_text(encoding="utf-8"), path.parent)
    logger.info(f"Loaded configuration {path} (sha256 {config.digest()[:12]})")
    return config
