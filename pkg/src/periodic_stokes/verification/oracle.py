"""
Finite-difference boundary-value oracle for single (k, xi) modes.

The coupled ODE system

    (ik + |xi|^2) v - v'' + i xi p = 0
    (ik + |xi|^2) w - w'' + p'    = 0
    i xi.v + w'                   = 0

is discretized with second-order stencils on a smoothly stretched grid, velocities on
the nodes and pressure on the cell midpoints, with (v, w)(0) = (h', h_n) and the decay
closure (d + |xi|)(d + lambda) u = 0 at the last node. It never shares code with the
closed-form solver beyond the mode type.
"""

from __future__ import annotations

import logging
import math
import warnings
from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import sparse
from scipy.sparse.linalg import MatrixRankWarning, spsolve

from periodic_stokes.exceptions import OracleError
from periodic_stokes.symbols import ModePoint

logger = logging.getLogger(__name__)

MIN_NODES = 512
DEFAULT_NODES = 2049
STRETCH = 4.0
DECAY_LENGTHS = 40.0


class OracleProfiles(BaseModel):
    """Oracle velocity (nodes, n) and pressure (nodes,) on ``nodes``."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    nodes: np.ndarray
    velocity: np.ndarray
    pressure: np.ndarray


def oracle_grid(
    mode: ModePoint, nodes: int = DEFAULT_NODES, x_max: float = 20.0, alpha: float = STRETCH
) -> np.ndarray:
    """
    Stretched grid x = X (e^{alpha z} - 1) / (e^alpha - 1) on uniform z in [0, 1].

    X = min(x_max, 40 / rate) where rate is the slower of the two decay rates.
    """
    rate = mode.xi_norm if mode.xi_norm > 0.0 else mode.root.real
    extent = min(x_max, DECAY_LENGTHS / rate) if rate > 0.0 else x_max
    z = np.linspace(0.0, 1.0, nodes)
    return extent * np.expm1(alpha * z) / math.expm1(alpha)


def _stencil(points: np.ndarray, x0: float, derivative: int) -> np.ndarray:
    """Finite-difference weights for the ``derivative``-th derivative at ``x0``."""
    offsets = points - x0
    order = np.arange(len(points))
    vandermonde = offsets[np.newaxis, :] ** order[:, np.newaxis]
    rhs = np.zeros(len(points))
    rhs[derivative] = math.factorial(derivative)
    return np.linalg.solve(vandermonde, rhs)


def _interior_weights(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    h1 = x[1:-1] - x[:-2]
    h2 = x[2:] - x[1:-1]
    total = h1 + h2
    first = np.stack([-h2 / (h1 * total), (h2 - h1) / (h1 * h2), h1 / (h2 * total)], axis=1)
    second = np.stack([2.0 / (h1 * total), -2.0 / (h1 * h2), 2.0 / (h2 * total)], axis=1)
    return first, second


class _Assembly:
    """COO triplets of a square complex system."""

    def __init__(self, size: int) -> None:
        self.size = size
        self.rows: list[np.ndarray] = []
        self.cols: list[np.ndarray] = []
        self.data: list[np.ndarray] = []

    def add(
        self, rows: np.ndarray | int, cols: np.ndarray | int, values: np.ndarray | complex
    ) -> None:
        r, c, v = np.broadcast_arrays(np.asarray(rows), np.asarray(cols), np.asarray(values))
        self.rows.append(r.ravel())
        self.cols.append(c.ravel())
        self.data.append(v.astype(np.complex128).ravel())

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        matrix = sparse.csr_matrix(
            (np.concatenate(self.data), (np.concatenate(self.rows), np.concatenate(self.cols))),
            shape=(self.size, self.size),
        )
        with warnings.catch_warnings():
            warnings.simplefilter("error", MatrixRankWarning)
            try:
                solution = spsolve(matrix.tocsc(), rhs)
            except MatrixRankWarning as e:
                raise OracleError("Oracle system is singular") from e
        if not np.all(np.isfinite(solution)):
            raise OracleError("Oracle system produced non-finite values")
        return np.asarray(solution)


def _closure(
    assembly: _Assembly, x: np.ndarray, slow: complex, fast: complex, stride: int, offset: int
) -> None:
    """(d + slow)(d + fast) u = 0 at the last node with one-sided stencils."""
    last = len(x) - 1
    second = _stencil(x[last - 3 :], x[last], 2)
    first = _stencil(x[last - 2 :], x[last], 1)
    row = last * stride + offset
    for j, weight in enumerate(second):
        assembly.add(row, (last - 3 + j) * stride + offset, weight)
    for j, weight in enumerate(first):
        assembly.add(row, (last - 2 + j) * stride + offset, (slow + fast) * weight)
    assembly.add(row, row, slow * fast)


def _scalar_profiles(x: np.ndarray, mode: ModePoint, data: complex) -> np.ndarray:
    """(ik) u - u'' = 0, u(0) = data, decaying with lambda = sqrt(ik)."""
    size = len(x)
    assembly = _Assembly(size)
    _, second = _interior_weights(x)
    interior = np.arange(1, size - 1)
    assembly.add(interior, interior, 1j * mode.k - second[:, 1])
    assembly.add(interior, interior - 1, -second[:, 0])
    assembly.add(interior, interior + 1, -second[:, 2])
    assembly.add(0, 0, 1.0)
    _closure(assembly, x, 0.0, mode.root, 1, 0)
    rhs = np.zeros(size, dtype=np.complex128)
    rhs[0] = data
    return assembly.solve(rhs)


def _pressure_at_nodes(x: np.ndarray, midpoints: np.ndarray, staggered: np.ndarray) -> np.ndarray:
    """Midpoint pressure moved to the nodes: linear inside, quadratic extrapolation at the ends."""
    pressure = np.empty(len(x), dtype=np.complex128)
    left, right, inner = midpoints[:-1], midpoints[1:], x[1:-1]
    pressure[1:-1] = ((right - inner) * staggered[:-1] + (inner - left) * staggered[1:]) / (
        right - left
    )
    pressure[0] = _stencil(midpoints[:3], x[0], 0) @ staggered[:3]
    pressure[-1] = _stencil(midpoints[-3:], x[-1], 0) @ staggered[-3:]
    return pressure


def bvp_oracle(
    mode: ModePoint,
    hhat_tangential: Sequence[complex],
    hhat_normal: complex,
    normal_grid: np.ndarray,
) -> OracleProfiles:
    """
    Second-order finite-difference profiles of a single mode.

    Velocities live on the nodes and the pressure on the cell midpoints, so the
    divergence row and the normal pressure gradient are compact centered differences.

    Args:
        mode (ModePoint): The mode (k, xi).
        hhat_tangential (Sequence[complex]): Tangential boundary coefficients.
        hhat_normal (complex): Normal boundary coefficient.
        normal_grid (np.ndarray): Increasing nodes starting at 0, at least 512 of them.

    Raises:
        OracleError: Too few nodes, or the closure makes the system singular
          ((k, xi) = (0, 0), or xi = 0 with nonzero normal data).
    """
    x = np.asarray(normal_grid, dtype=np.float64)
    size = len(x)
    if size < MIN_NODES:
        raise OracleError(f"Oracle needs at least {MIN_NODES} nodes, got {size}")
    if len(hhat_tangential) != len(mode.xi):
        raise ValueError(
            f"`hhat_tangential` has {len(hhat_tangential)} entries for a {len(mode.xi)}-dim xi"
        )
    n = len(mode.xi) + 1
    s, lam = mode.xi_norm, mode.root
    if s == 0.0:
        if mode.is_steady:
            raise OracleError("Oracle system is singular at (k, xi) = (0, 0)")
        if hhat_normal != 0:
            raise OracleError(f"No decaying solution at xi = 0 with hhat_normal={hhat_normal!r}")
        velocity = np.zeros((size, n), dtype=np.complex128)
        for j, h in enumerate(hhat_tangential):
            velocity[:, j] = _scalar_profiles(x, mode, h)
        return OracleProfiles(
            nodes=x, velocity=velocity, pressure=np.zeros(size, dtype=np.complex128)
        )

    # unknowns: u at node i, component c -> i * n + c; p at midpoint j -> offset + j
    offset = size * n
    midpoints = 0.5 * (x[1:] + x[:-1])
    widths = np.diff(x)
    assembly = _Assembly(offset + size - 1)
    _, second = _interior_weights(x)
    interior = np.arange(1, size - 1)
    neighbours = (interior - 1, interior, interior + 1)
    diagonal = 1j * mode.k + s**2

    span = midpoints[1:] - midpoints[:-1]
    to_left = (midpoints[1:] - x[interior]) / span
    to_right = (x[interior] - midpoints[:-1]) / span
    below, above = offset + interior - 1, offset + interior
    for c in range(n):
        rows = interior * n + c
        for j, node in enumerate(neighbours):
            weight = -second[:, j] + (diagonal if j == 1 else 0.0)
            assembly.add(rows, node * n + c, weight)
        if c < n - 1:
            assembly.add(rows, below, 1j * mode.xi[c] * to_left)
            assembly.add(rows, above, 1j * mode.xi[c] * to_right)
        else:
            assembly.add(rows, below, -1.0 / span)
            assembly.add(rows, above, 1.0 / span)

    cells = np.arange(size - 1)
    rows = offset + cells
    for c in range(n - 1):
        assembly.add(rows, cells * n + c, 0.5j * mode.xi[c])
        assembly.add(rows, (cells + 1) * n + c, 0.5j * mode.xi[c])
    assembly.add(rows, cells * n + n - 1, -1.0 / widths)
    assembly.add(rows, (cells + 1) * n + n - 1, 1.0 / widths)

    rhs = np.zeros(offset + size - 1, dtype=np.complex128)
    for c in range(n):
        assembly.add(c, c, 1.0)
        rhs[c] = hhat_tangential[c] if c < n - 1 else hhat_normal
        _closure(assembly, x, s, lam, n, c)

    solution = assembly.solve(rhs)
    return OracleProfiles(
        nodes=x,
        velocity=solution[:offset].reshape(size, n),
        pressure=_pressure_at_nodes(x, midpoints, solution[offset:]),
    )


def oracle_reference(
    mode: ModePoint,
    hhat_tangential: Sequence[complex],
    hhat_normal: complex,
    nodes: int = DEFAULT_NODES,
    x_max: float = 20.0,
) -> OracleProfiles:
    """Richardson extrapolation of the oracle on ``nodes`` and ``2 nodes - 1`` points."""
    coarse_grid = oracle_grid(mode, nodes, x_max)
    fine_grid = oracle_grid(mode, 2 * nodes - 1, x_max)
    coarse = bvp_oracle(mode, hhat_tangential, hhat_normal, coarse_grid)
    fine = bvp_oracle(mode, hhat_tangential, hhat_normal, fine_grid)
    return OracleProfiles(
        nodes=coarse_grid,
        velocity=(4.0 * fine.velocity[::2] - coarse.velocity) / 3.0,
        pressure=(4.0 * fine.pressure[::2] - coarse.pressure) / 3.0,
    )


def self_convergence_order(
    mode: ModePoint,
    hhat_tangential: Sequence[complex],
    hhat_normal: complex,
    nodes: int = 513,
    x_max: float = 20.0,
) -> float:
    """
    Observed order log2(e1 / e2) from three nested grids with 2x refinement.

    Velocity and pressure are measured separately and the lower order is returned.
    """
    levels = [nodes, 2 * nodes - 1, 4 * nodes - 3]
    solutions = [
        bvp_oracle(mode, hhat_tangential, hhat_normal, oracle_grid(mode, m, x_max))
        for m in levels
    ]

    def gap(a: np.ndarray, b: np.ndarray) -> float:
        return float(np.max(np.abs(a - b[::2])))

    orders: dict[str, float] = {}
    for name in ("velocity", "pressure"):
        profiles = [getattr(solution, name) for solution in solutions]
        coarse, fine = gap(profiles[0], profiles[1]), gap(profiles[1], profiles[2])
        if coarse == 0.0 and fine == 0.0:
            # zero pressure at xi = 0
            continue
        if fine == 0.0:
            raise OracleError(f"Oracle refinement of the {name} produced identical solutions")
        orders[name] = math.log2(coarse / fine)
    if not orders:
        raise OracleError("Oracle refinement produced identical solutions")
    order = min(orders.values())
    logger.debug(f"Oracle self-convergence order {order:.3f} at k={mode.k} xi={mode.xi}")
    return order
