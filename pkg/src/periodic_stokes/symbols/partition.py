"""
Parabolic Littlewood-Paley partition of unity.

phi_l(eta, xi) = h(2^{-l} rho) / sum_j h(2^{-j} rho) with rho = <eta, xi>, so phi_l is
supported on the shell 2^{l-1} <= rho <= 2^{l+1} and the shells sum to one off rho = 0.
"""

import numpy as np

from periodic_stokes.symbols.modes import BumpSpec, ParabolicScale

DEFAULT_BUMP = BumpSpec()


def shell_weight(rho: np.ndarray | float, l: int, bump: BumpSpec = DEFAULT_BUMP) -> np.ndarray:
    """phi_l as a function of the parabolic length rho."""
    rho = np.asarray(rho, dtype=np.float64)
    positive = rho > 0.0
    safe = np.where(positive, rho, 1.0)
    octave = np.floor(np.log2(safe))
    total = np.zeros_like(safe)
    for shift in (-1.0, 0.0, 1.0, 2.0):
        total = total + bump(safe * np.exp2(-(octave + shift)))
    numerator = bump(safe * 2.0 ** (-l))
    weight = np.where(total > 0.0, numerator / np.where(total > 0.0, total, 1.0), 0.0)
    return np.where(positive, weight, 0.0)


def partition_phi(
    scale: ParabolicScale,
    bump: BumpSpec,
    l: int,
    eta: np.ndarray | float,
    xi: np.ndarray | float,
) -> np.ndarray:
    """
    Evaluate the l-th partition function at (eta, xi).

    ``xi`` is a tangential vector with components on its last axis; a scalar is taken
    as a one-dimensional wavenumber.
    """
    xi = np.asarray(xi, dtype=np.float64)
    xi_norm = np.abs(xi) if xi.ndim == 0 else np.linalg.norm(xi, axis=-1)
    return shell_weight(scale(eta, xi_norm), l, bump)


def shell_range(rho: np.ndarray) -> tuple[int, int]:
    """
    Shell indices l = 0..l_max covering the positive values of ``rho``.

    l_max is the smallest index with 2^{l_max} > max rho, beyond which every shell
    vanishes on the sampled lattice.
    """
    positive = rho[rho > 0.0]
    if positive.size == 0:
        return 0, 0
    return 0, max(int(np.floor(np.log2(np.max(positive)))) + 1, 0)
