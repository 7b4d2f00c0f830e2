"""
Boundary pressure symbol q0 = q1 + q2 of the purely oscillatory half-space problem.

    q1 = -i(|xi| + lambda)(xi/|xi|).h' + (lambda + |xi|) h_n
    q2 = (ik/|xi|) h_n

with lambda = sqrt(|xi|^2 + ik). The pressure of the boundary solution is q0 e^{-|xi| x_n}.
"""

from collections.abc import Sequence

import numpy as np

from periodic_stokes.exceptions import SymbolDomainError
from periodic_stokes.symbols.modes import ModePoint, principal_root

type ArrayLike = np.ndarray | complex | float


def q_split_kernel(
    k: ArrayLike,
    xi: Sequence[ArrayLike],
    h_tangential: Sequence[ArrayLike],
    h_normal: ArrayLike,
    perturb: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Vectorized (q1, q2) over broadcastable arrays.

    Entries with xi = 0 return (0, 0); the caller decides what those modes mean.
    With ``perturb`` the sign of the tangential term is flipped.
    """
    xi_norm = np.sqrt(sum(np.asarray(x, dtype=np.float64) ** 2 for x in xi))
    at_origin = xi_norm == 0.0
    safe = np.where(at_origin, 1.0, xi_norm)
    root = principal_root(k, xi_norm)
    xi_dot_h = sum(np.asarray(x) * np.asarray(h) for x, h in zip(xi, h_tangential, strict=True))
    tangential = -1j * (xi_norm + root) * xi_dot_h / safe
    if perturb:
        tangential = -tangential
    q1 = tangential + (root + xi_norm) * np.asarray(h_normal)
    q2 = 1j * np.asarray(k) / safe * np.asarray(h_normal)
    return np.where(at_origin, 0.0, q1), np.where(at_origin, 0.0, q2)


def _check(mode: ModePoint, hhat_tangential: Sequence[complex], hhat_normal: complex) -> None:
    if len(hhat_tangential) != len(mode.xi):
        raise ValueError(
            f"`hhat_tangential` has {len(hhat_tangential)} entries for a {len(mode.xi)}-dim xi"
        )
    if mode.k == 0.0:
        raise SymbolDomainError("q0 is defined for k != 0; a steady mode reached the symbol")
    if mode.xi_norm == 0.0 and hhat_normal != 0:
        raise SymbolDomainError(
            f"q0 is singular at xi = 0 with hhat_normal={hhat_normal!r} (k={mode.k!r})"
        )


def q1_q2_split(
    mode: ModePoint, hhat_tangential: Sequence[complex], hhat_normal: complex
) -> tuple[complex, complex]:
    """The split q0 = q1 + q2 with q2 = (ik/|xi|) hhat_normal."""
    _check(mode, hhat_tangential, hhat_normal)
    q1, q2 = q_split_kernel(mode.k, mode.xi, list(hhat_tangential), hhat_normal)
    return complex(q1), complex(q2)


def q0_symbol(
    mode: ModePoint,
    hhat_tangential: Sequence[complex],
    hhat_normal: complex,
    perturb: bool = False,
) -> complex:
    """Boundary pressure coefficient q0(k, xi) for data (hhat', hhat_n)."""
    _check(mode, hhat_tangential, hhat_normal)
    q1, q2 = q_split_kernel(mode.k, mode.xi, list(hhat_tangential), hhat_normal, perturb)
    return complex(q1 + q2)
