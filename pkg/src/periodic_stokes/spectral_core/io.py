"""
Field files: a UTF-8 ``key: value`` header closed by a blank line, then the samples
as row-major little-endian float64.
"""

import logging
import pathlib

import numpy as np

from periodic_stokes.exceptions import GridError
from periodic_stokes.spectral_core.fields import PhysicalField
from periodic_stokes.spectral_core.grid import TorusPlaneGrid

logger = logging.getLogger(__name__)

DTYPE = "float64-le"


def _header(field: PhysicalField) -> str:
    grid = field.grid
    dims = field.values.shape[:-1]
    lines = [
        f"dims: {' '.join(str(d) for d in dims)}",
        f"components: {field.components}",
        f"tau: {grid.tau!r}",
        f"L: {grid.length!r}",
        f"normal_grid: {' '.join(repr(x) for x in grid.normal_grid)}",
        f"lattice_cells: {grid.lattice_cells}",
        f"dtype: {DTYPE}",
    ]
    return "\n".join(lines) + "\n\n"


def encode_field(field: PhysicalField) -> bytes:
    payload = np.ascontiguousarray(field.values, dtype="<f8").tobytes(order="C")
    return _header(field).encode("utf-8") + payload


def write_field(path: str | pathlib.Path, field: PhysicalField) -> pathlib.Path:
    """Write ``field`` to ``path``; identical fields give identical bytes."""
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_field(field))
    logger.debug(f"Wrote field {path} with shape {field.values.shape}")
    return path


def decode_field(raw: bytes) -> PhysicalField:
    marker = raw.find(b"\n\n")
    if marker < 0:
        raise GridError("Field file has no header terminator")
    header: dict[str, str] = {}
    for line in raw[:marker].decode("utf-8").splitlines():
        key, sep, value = line.partition(":")
        if not sep:
            raise GridError(f"Malformed field header line: {line!r}")
        header[key.strip()] = value.strip()

    missing = {"dims", "components", "tau", "L", "normal_grid", "dtype"} - header.keys()
    if missing:
        raise GridError(f"Field header is missing keys: {sorted(missing)}")
    if header["dtype"] != DTYPE:
        raise GridError(f"Unsupported field dtype: {header['dtype']}")

    dims = tuple(int(d) for d in header["dims"].split())
    components = int(header["components"])
    normal = tuple(float(x) for x in header["normal_grid"].split())
    if len(dims) < 3 or (dims[0] - 1) % 2:
        raise GridError(f"Field dims {dims} do not describe a time-periodic half-space grid")
    grid = TorusPlaneGrid(
        tau=float(header["tau"]),
        n=len(dims) - 1,
        time_modes=(dims[0] - 1) // 2,
        tangential_modes=dims[1],
        length=float(header["L"]),
        normal_grid=normal,
        lattice_cells=int(header.get("lattice_cells", len(normal) - 1)),
    )
    on_boundary = dims[-1] == 1 and len(normal) > 1
    payload = np.frombuffer(raw[marker + 2 :], dtype="<f8")
    expected = int(np.prod(dims)) * components
    if payload.size != expected:
        raise GridError(f"Field payload holds {payload.size} values, expected {expected}")
    return PhysicalField(
        grid=grid,
        values=payload.reshape((*dims, components)).astype(np.float64),
        components=components,
        on_boundary=on_boundary,
    )


def read_field(path: str | pathlib.Path) -> PhysicalField:
    path = pathlib.Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Field file not found: {path}")
    return decode_field(path.read_bytes())
