"""
Fourier-multiplier symbols of the half-space boundary problem.

Tangential wavenumbers are passed as arrays with the components on the last axis.
"""

from typing import Literal

import numpy as np

from periodic_stokes.exceptions import SymbolDomainError
from periodic_stokes.symbols.modes import principal_root

type ProfileKind = Literal["parabolic", "tangential"]


def _xi_norm(xi: np.ndarray | float) -> np.ndarray:
    xi = np.asarray(xi, dtype=np.float64)
    return np.abs(xi) if xi.ndim == 0 else np.linalg.norm(xi, axis=-1)


def symbol_M(eta: np.ndarray | float, xi: np.ndarray | float) -> np.ndarray:
    """M(eta, xi) = |xi| / sqrt(|xi|^2 + i eta), defined for xi != 0."""
    xi_norm = _xi_norm(xi)
    if np.any(xi_norm == 0.0):
        raise SymbolDomainError("M is evaluated at xi = 0")
    return xi_norm / principal_root(eta, xi_norm)


def _root_ratio(eta: np.ndarray | float, xi_norm: np.ndarray) -> np.ndarray:
    eta = np.asarray(eta, dtype=np.float64)
    denominator = xi_norm + np.sqrt(np.abs(eta))
    if np.any(denominator == 0.0):
        raise SymbolDomainError("Symbol evaluated at (eta, xi) = (0, 0)")
    return principal_root(eta, xi_norm) / denominator


def symbol_M1(eta: np.ndarray | float, xi: np.ndarray | float) -> np.ndarray:
    """M1(eta, xi) = sqrt(|xi|^2 + i eta) / (|xi| + |eta|^{1/2}) * xi/|xi|, an (n-1)-vector."""
    xi = np.asarray(xi, dtype=np.float64)
    if xi.ndim == 0:
        xi = xi[None]
    xi_norm = np.linalg.norm(xi, axis=-1)
    if np.any(xi_norm == 0.0):
        raise SymbolDomainError("M1 is evaluated at xi = 0")
    return (_root_ratio(eta, xi_norm) / xi_norm)[..., None] * xi


def symbol_M2(eta: np.ndarray | float, xi: np.ndarray | float) -> np.ndarray:
    """M2(eta, xi) = sqrt(|xi|^2 + i eta) / (|xi| + |eta|^{1/2}), defined off (0, 0)."""
    return _root_ratio(eta, _xi_norm(xi))


def symbol_heat_profile(
    eta: np.ndarray | float,
    xi: np.ndarray | float,
    x_n: np.ndarray | float,
    power: int = 0,
    kind: ProfileKind = "parabolic",
) -> np.ndarray:
    """
    Normal profile symbol (z x_n)^power e^{-z x_n}.

    ``kind="parabolic"`` takes z = sqrt(|xi|^2 + i eta), ``kind="tangential"`` takes z = |xi|.
    """
    if power < 0:
        raise ValueError(f"`power` must be nonnegative, got {power}")
    x_n = np.asarray(x_n, dtype=np.float64)
    if np.any(x_n < 0.0):
        raise ValueError("`x_n` must be nonnegative")
    xi_norm = _xi_norm(xi)
    if kind == "parabolic":
        z = principal_root(eta, xi_norm)
    elif kind == "tangential":
        z = xi_norm.astype(np.complex128)
    else:
        raise ValueError(f"Unsupported profile kind: {kind}")
    zx = z * x_n
    return zx**power * np.exp(-zx)
