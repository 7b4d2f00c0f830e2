"""
Half-space Stokes problem with Dirichlet data and zero forcing.

Oscillatory modes (k != 0) use the pressure ansatz p = q0 e^{-|xi| x_n}; the velocity
is then a combination of the two decaying branches e^{-|xi| x_n} and e^{-lambda x_n}:

    v = -(xi q0 / k) e^{-|xi| x_n} + (h' + xi q0 / k) e^{-lambda x_n}
    w = (|xi| q0 / (ik)) e^{-|xi| x_n} + (h_n - |xi| q0 / (ik)) e^{-lambda x_n}

The steady modes (k = 0) have the double root |xi| and profiles (a + b x_n) e^{-|xi| x_n}.
All x_n-derivatives are evaluated from the closed forms.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np

from periodic_stokes.exceptions import CompatibilityError, GridError, SymbolDomainError
from periodic_stokes.solvers.data import BoundaryData, SolverOptions, StageFields, StokesSolution
from periodic_stokes.solvers.heat import require_oscillatory, require_steady
from periodic_stokes.spectral_core import SpectralField, TorusPlaneGrid, remove_nyquist
from periodic_stokes.symbols import ModePoint, principal_root, q_split_kernel

logger = logging.getLogger(__name__)

type Profile = tuple[np.ndarray, np.ndarray, np.ndarray]
type Profiles = tuple[list[Profile], Profile]


def _norm(xis: Sequence[np.ndarray]) -> np.ndarray:
    return np.sqrt(sum(np.asarray(xi, dtype=np.float64) ** 2 for xi in xis))


def _branch(rate: np.ndarray, x: np.ndarray) -> Profile:
    """e^{-rate x} with its first and second x_n-derivatives."""
    decay = np.exp(-rate * x)
    return decay, -rate * decay, rate**2 * decay


def _combine(first: Profile, a: np.ndarray, second: Profile, b: np.ndarray) -> Profile:
    v, d1, d2 = (a * e + b * f for e, f in zip(first, second, strict=True))
    return v, d1, d2


def _linear_profile(a: np.ndarray, b: np.ndarray, s: np.ndarray, x: np.ndarray) -> Profile:
    """(a + b x) e^{-s x} and its first two derivatives."""
    decay = np.exp(-s * x)
    value = a + b * x
    return (
        value * decay,
        (b - s * value) * decay,
        (s**2 * value - 2.0 * s * b) * decay,
    )


def oscillatory_profiles(
    k: np.ndarray,
    xis: Sequence[np.ndarray],
    tangential: Sequence[np.ndarray],
    normal: np.ndarray,
    x: np.ndarray,
    perturb: bool = False,
) -> Profiles:
    """
    Closed-form velocity and pressure profiles over broadcastable mode arrays.

    Entries with k = 0 come out as zeros; at xi = 0 the normal data are ignored and the
    profiles reduce to v = h' e^{-lambda x_n}, w = p = 0.
    """
    s = _norm(xis)
    steady_row = np.asarray(k) == 0.0
    normal = np.where((s == 0.0) | steady_row, 0.0, normal)
    tangential = [np.where(steady_row, 0.0, ht) for ht in tangential]

    q1, q2 = q_split_kernel(k, xis, tangential, normal, perturb=perturb)
    q0 = np.where(steady_row, 0.0, q1 + q2)
    safe_k = np.where(steady_row, 1.0, k)

    slow = _branch(s, x)
    fast = _branch(principal_root(k, s), x)
    velocity = [
        _combine(slow, -xi * q0 / safe_k, fast, ht + xi * q0 / safe_k)
        for xi, ht in zip(xis, tangential, strict=True)
    ]
    shear = s * q0 / (1j * safe_k)
    velocity.append(_combine(slow, shear, fast, normal - shear))
    pressure = (q0 * slow[0], q0 * slow[1], q0 * slow[2])
    return velocity, pressure


def steady_profiles(
    xis: Sequence[np.ndarray],
    tangential: Sequence[np.ndarray],
    normal: np.ndarray,
    x: np.ndarray,
) -> Profiles:
    """
    Decaying steady profiles with beta = |xi| h_n - i xi.h'.

        v = (h' - i xi beta x_n / |xi|) e^{-|xi| x_n}
        w = (h_n + beta x_n) e^{-|xi| x_n}
        p = 2 beta e^{-|xi| x_n}

    At xi = 0 this is the plug flow v = h', w = p = 0 (shear gauge a = 0).
    """
    s = _norm(xis)
    origin = s == 0.0
    normal = np.where(origin, 0.0, normal)
    safe_s = np.where(origin, 1.0, s)
    xi_dot_h = sum(xi * ht for xi, ht in zip(xis, tangential, strict=True))
    beta = s * normal - 1j * xi_dot_h

    velocity = [
        _linear_profile(ht, -1j * xi * beta / safe_s, s, x)
        for xi, ht in zip(xis, tangential, strict=True)
    ]
    velocity.append(_linear_profile(normal, beta, s, x))
    pressure = _linear_profile(2.0 * beta, np.zeros_like(beta), s, x)
    return velocity, pressure


def mode_profiles(
    mode: ModePoint,
    hhat_tangential: Sequence[complex],
    hhat_normal: complex,
    x: np.ndarray,
    perturb: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Profiles of a single mode at the nodes ``x``.

    Returns:
        tuple[np.ndarray, np.ndarray]: Velocity shaped (len(x), n) and pressure (len(x),).

    Raises:
        SymbolDomainError: hhat_normal != 0 at xi = 0.
    """
    if len(hhat_tangential) != len(mode.xi):
        raise ValueError(
            f"`hhat_tangential` has {len(hhat_tangential)} entries for a {len(mode.xi)}-dim xi"
        )
    if mode.xi_norm == 0.0 and hhat_normal != 0:
        raise SymbolDomainError(f"hhat_normal must vanish at xi = 0, got {hhat_normal!r}")
    x = np.asarray(x, dtype=np.float64)
    xis = [np.asarray(xi) for xi in mode.xi]
    tangential = [np.asarray(h, dtype=np.complex128) for h in hhat_tangential]
    normal = np.asarray(hhat_normal, dtype=np.complex128)
    if mode.is_steady:
        velocity, pressure = steady_profiles(xis, tangential, normal, x)
    else:
        velocity, pressure = oscillatory_profiles(
            np.asarray(mode.k), xis, tangential, normal, x, perturb
        )
    values = np.stack([np.broadcast_to(v[0], x.shape) for v in velocity], axis=-1)
    return values, np.broadcast_to(pressure[0], x.shape).copy()


class _BoundaryModes:
    """
    Boundary coefficients split into mode arrays.

    ``values`` keeps its length-one node axis so that every array broadcasts against the
    normal nodes ``x`` on that axis.
    """

    def __init__(self, values: np.ndarray, grid: TorusPlaneGrid) -> None:
        self.k, _ = grid.mode_axes(trailing=1)
        self.xis = grid.derivative_wavenumbers(trailing=1)
        self.x = grid.nodes.reshape((1,) * grid.n + (-1,))
        self.tangential = [values[..., j] for j in range(grid.n - 1)]
        self.normal = values[..., grid.n - 1]


def _field(grid: TorusPlaneGrid, parts: list[Profile]) -> SpectralField:
    return SpectralField(
        grid=grid,
        values=np.stack([p[0] for p in parts], axis=-1),
        components=len(parts),
        normal_derivatives=tuple(np.stack([p[d] for p in parts], axis=-1) for d in (1, 2)),
    )


def _stage(grid: TorusPlaneGrid, profiles: Profiles) -> StageFields:
    velocity, pressure = profiles
    return StageFields(velocity=_field(grid, velocity), pressure=_field(grid, [pressure]))


def _on_grid(h: SpectralField, grid: TorusPlaneGrid | None) -> SpectralField:
    if grid is None:
        return h
    source = h.grid
    same_plane = (
        grid.n == source.n
        and grid.lattice_dims == source.lattice_dims
        and grid.tau == source.tau
        and grid.length == source.length
    )
    if not same_plane:
        raise GridError(
            f"Boundary data on ({source.describe()}) cannot be evaluated on ({grid.describe()})"
        )
    return SpectralField(grid=grid, values=h.values, components=h.components, on_boundary=True)


def oscillatory_boundary_stage(
    h: SpectralField, options: SolverOptions | None = None
) -> StageFields:
    """
    Boundary stage for purely oscillatory boundary coefficients ``h``.

    ``h`` must be free of tangential Nyquist content and satisfy hhat_n(k, 0) = 0.
    Rows with k = 0 are returned as exact zeros.
    """
    options = options or SolverOptions()
    grid = h.grid
    require_oscillatory(h, "The oscillatory boundary solver")
    modes = _BoundaryModes(h.values, grid)
    profiles = oscillatory_profiles(
        modes.k, modes.xis, modes.tangential, modes.normal, modes.x, options.perturb_q0
    )
    logger.debug(f"Oscillatory boundary stage on {grid.describe()}")
    return _stage(grid, profiles)


def steady_boundary_stage(h: SpectralField, options: SolverOptions | None = None) -> StageFields:
    """Boundary stage for time-independent boundary coefficients ``h``."""
    options = options or SolverOptions()
    grid = h.grid
    require_steady(h, "The steady boundary solver")
    row = h.values[:1]
    modes = _BoundaryModes(row, grid)
    scale = float(np.max(np.abs(row))) if row.size else 0.0
    mean_normal = complex(modes.normal[(0,) * (grid.n + 1)])
    if abs(mean_normal) > options.compat_tolerance * max(scale, 1.0):
        raise CompatibilityError(
            "Steady boundary data has nonzero tangential mean of h_n "
            f"({mean_normal:.3e}) at k = 0",
            [0],
        )
    velocity, pressure = steady_profiles(modes.xis, modes.tangential, modes.normal, modes.x)

    def pad(profile: Profile) -> Profile:
        out = []
        for part in profile:
            full = np.zeros((grid.time_samples, *part.shape[1:]), dtype=np.complex128)
            full[:1] = part
            out.append(full)
        return out[0], out[1], out[2]

    logger.debug(f"Steady boundary stage on {grid.describe()}")
    return _stage(grid, ([pad(p) for p in velocity], pad(pressure)))


def _checked_boundary(H: BoundaryData, grid: TorusPlaneGrid | None) -> SpectralField:
    if not H.compat_normal:
        raise CompatibilityError(
            "Boundary data h_n has nonzero tangential mean at time modes "
            f"k = {H.offending_frequencies}",
            H.offending_frequencies,
        )
    return _on_grid(remove_nyquist(H.spectral), grid)


def solve_boundary_oscillatory(
    H: BoundaryData, grid: TorusPlaneGrid | None = None, options: SolverOptions | None = None
) -> StokesSolution:
    """
    Solve the unforced, divergence-free problem with purely oscillatory boundary data H.

    Args:
        H (BoundaryData): Dirichlet data, purely oscillatory and with compatible h_n.
        grid (TorusPlaneGrid, optional): Grid to evaluate on. It may use another normal
          grid but must share the time and tangential lattice of ``H``.
        options (SolverOptions, optional): Solver knobs (``perturb_q0``).

    Raises:
        PreconditionError: ``H`` has a nonzero time mean.
        CompatibilityError: hhat_n(k, 0) != 0 for some k != 0.
    """
    stage = oscillatory_boundary_stage(_checked_boundary(H, grid), options)
    return StokesSolution.from_stages({"boundary": stage})


def pressure_gradient_split(
    H: BoundaryData, grid: TorusPlaneGrid | None = None, options: SolverOptions | None = None
) -> tuple[SpectralField, SpectralField]:
    """
    The two boundary pressure-gradient operators of the oscillatory boundary solution.

    G carries xi q1 e^{-|xi| x_n} and B carries xi q2 e^{-|xi| x_n} (n - 1 components each),
    so i (G + B) is the tangential pressure gradient of ``solve_boundary_oscillatory(H)``.
    """
    options = options or SolverOptions()
    spec = _checked_boundary(H, grid)
    require_oscillatory(spec, "The pressure-gradient split")
    target = spec.grid
    modes = _BoundaryModes(spec.values, target)
    steady_row = modes.k == 0.0
    s = _norm(modes.xis)
    normal = np.where((s == 0.0) | steady_row, 0.0, modes.normal)
    q1, q2 = q_split_kernel(
        modes.k, modes.xis, modes.tangential, normal, perturb=options.perturb_q0
    )
    slow = _branch(s, modes.x)

    def operator(q: np.ndarray) -> SpectralField:
        q = np.where(steady_row, 0.0, q)
        parts = [(xi * q * slow[0], xi * q * slow[1], xi * q * slow[2]) for xi in modes.xis]
        return _field(target, parts)

    return operator(q1), operator(q2)
