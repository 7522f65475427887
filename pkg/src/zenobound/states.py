"""Two-qutrit states used by the activation protocol.

Basis ordering is row-major, ``|ab>`` maps to index ``3*a + b``.
"""

from __future__ import annotations

import numpy as np

from .linalg import as_matrix, eigvalsh, is_hermitian

D = 3
STATE_TOL = 1e-10


class ParameterError(ValueError):
    """A state or protocol parameter lies outside its allowed range."""


def basis_index(a: int, b: int) -> int:
    return D * a + b


def ket(*levels: int) -> np.ndarray:
    v = np.zeros(D ** len(levels), dtype=complex)
    idx = 0
    for lv in levels:
        idx = D * idx + lv
    v[idx] = 1.0
    return v


def density(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def is_density_matrix(rho, tol: float = STATE_TOL) -> bool:
    rho = as_matrix(rho)
    if not is_hermitian(rho, tol):
        return False
    if abs(np.trace(rho) - 1.0) > tol:
        return False
    return bool(eigvalsh(rho)[0] >= -tol)


def psi_plus() -> np.ndarray:
    """Maximally entangled two-qutrit vector (|00> + |11> + |22>)/sqrt(3)."""
    return (ket(0, 0) + ket(1, 1) + ket(2, 2)) / np.sqrt(3)


def _diag_mixture(pairs) -> np.ndarray:
    rho = np.zeros((D * D, D * D), dtype=complex)
    for a, b in pairs:
        rho[basis_index(a, b), basis_index(a, b)] = 1.0 / 3.0
    return rho


def sigma_plus() -> np.ndarray:
    return _diag_mixture([(0, 1), (1, 2), (2, 0)])


def sigma_minus() -> np.ndarray:
    return _diag_mixture([(1, 0), (2, 1), (0, 2)])


def sigma_alpha(alpha: float) -> np.ndarray:
    """Horodecki family: separable for alpha in [2, 3], PPT entangled in (3, 4], NPT above 4."""
    if not 2.0 <= alpha <= 5.0:
        raise ParameterError(f"alpha must lie in [2, 5], got {alpha}")
    return (
        (2.0 / 7.0) * density(psi_plus())
        + (alpha / 7.0) * sigma_plus()
        + ((5.0 - alpha) / 7.0) * sigma_minus()
    )


def sigma_free(F: float) -> np.ndarray:
    """Free-entangled input state with fidelity ``F`` to psi_plus."""
    if not 0.0 < F < 1.0:
        raise ParameterError(f"F must lie in (0, 1), got {F}")
    return F * density(psi_plus()) + (1.0 - F) * sigma_plus()


def z_projector(level: int) -> np.ndarray:
    if level not in (0, 1, 2):
        raise ParameterError(f"qutrit level must be 0, 1 or 2, got {level}")
    p = np.zeros((D, D), dtype=complex)
    p[level, level] = 1.0
    return p
