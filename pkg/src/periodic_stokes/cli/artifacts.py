"""
Artifacts written under the output directory of a run.

Everything except ``timings.json`` is a pure function of the configuration and the
seed, so the manifest of two identical runs lists identical hashes.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import pathlib
from collections.abc import Iterable, Sequence
from typing import Any

import numpy as np

from periodic_stokes.solvers import StokesSolution
from periodic_stokes.spectral_core import PhysicalField, write_field

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"
TIMINGS = "timings.json"
SUMMARY = "summary.json"


def sha256_file(path: pathlib.Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float | np.floating):
        return repr(float(value))
    return str(value)


class ArtifactWriter:
    """Collects the artifacts of one run and writes the manifest last."""

    def __init__(self, out: str | pathlib.Path) -> None:
        self.out = pathlib.Path(out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.written: list[str] = []
        self.timings: dict[str, float] = {}

    def _path(self, name: str) -> pathlib.Path:
        path = self.out / name
        if name not in self.written:
            self.written.append(name)
        logger.info(f"Writing {path}")
        return path

    def write_json(self, name: str, payload: Any) -> pathlib.Path:
        path = self._path(name)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path

    def write_csv(
        self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]
    ) -> pathlib.Path:
        path = self._path(name)
        with path.open("w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            writer.writerows([_cell(v) for v in row] for row in rows)
        return path

    def write_field(self, name: str, field: PhysicalField) -> pathlib.Path:
        return write_field(self._path(name), field)

    def write_slices(self, solution: StokesSolution) -> pathlib.Path:
        """Samples of u and p along x_n at t = 0 and x' = 0."""
        grid = solution.grid
        origin = (0,) * (1 + grid.plane_dims)
        velocity = solution.velocity.values[origin]
        pressure = solution.pressure.values[origin][:, 0]
        header = ["x_n", *(f"u{i + 1}" for i in range(grid.n)), "p"]
        rows = [
            (x, *(float(v) for v in u), float(p))
            for x, u, p in zip(grid.nodes, velocity, pressure, strict=True)
        ]
        return self.write_csv("slices.csv", header, rows)

    def write_summary(
        self,
        config_hash: str,
        status: str,
        norms: dict[str, float] | None = None,
        ratios: dict[str, float] | None = None,
        residuals: dict[str, float] | None = None,
    ) -> pathlib.Path:
        return self.write_json(
            SUMMARY,
            {
                "config_hash": config_hash,
                "norms": norms or {},
                "ratios": ratios or {},
                "residuals": residuals or {},
                "timings": TIMINGS,
                "status": status,
            },
        )

    def write_timings(self) -> pathlib.Path:
        """Wall-clock timings; the only artifact left out of the manifest."""
        path = self.out / TIMINGS
        path.write_text(json.dumps(self.timings, indent=2, sort_keys=True) + "\n", "utf-8")
        return path

    def write_manifest(self) -> pathlib.Path:
        entries = {name: sha256_file(self.out / name) for name in sorted(self.written)}
        path = self.out / MANIFEST
        path.write_text(json.dumps(entries, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        logger.info(f"Manifest lists {len(entries)} artifacts")
        return path
