"""Dense complex matrix kernel for 3-, 9- and 81-dimensional operators.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.
Subsystems are ordered left to right, so in ``tensor(a, b)`` the operator
``a`` acts on the high-order index.
"""

from __future__ import annotations

import math
from functools import reduce
from math import prod
from typing import NamedTuple, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


class ConvergenceError(ArithmeticError):
    pass


class HermitianEigen(NamedTuple):
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # orthonormal columns


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def approx_equal(a, b, tol: float) -> bool:
    """Entrywise max-abs comparison."""
    a, b = np.asarray(a), np.asarray(b)
    return a.shape == b.shape and float(np.max(np.abs(a - b), initial=0.0)) <= tol


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return approx_equal(m, dagger(m), tol)


def tensor(*ops) -> np.ndarray:
    """Kronecker product; the first operand indexes the leftmost subsystem."""
    if not ops:
        raise ValueError("tensor needs at least one operand")
    return reduce(np.kron, (as_matrix(o) for o in ops))


def _check_slots(slots: Sequence[int], dims: Sequence[int]) -> None:
    if len(set(slots)) != len(slots):
        raise ValueError(f"duplicate subsystem slot in {list(slots)}")
    for s in slots:
        if not 0 <= s < len(dims):
            raise ValueError(f"slot {s} out of range for {len(dims)} subsystems")


def embed_on_subsystems(op, slots: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Return the full-space operator acting as ``op`` on ``slots``, identity elsewhere.

    ``op`` is written in the order the slots are listed, so
    ``embed_on_subsystems(kron(x, y), (2, 0), dims)`` puts ``x`` on subsystem 2
    and ``y`` on subsystem 0.
    """
    op = as_matrix(op)
    slots = list(slots)
    _check_slots(slots, dims)
    sub = [dims[s] for s in slots]
    if op.shape[0] != prod(sub):
        raise ValueError(
            f"operator dimension {op.shape[0]} does not match subsystems {sub}"
        )
    rest = [s for s in range(len(dims)) if s not in slots]
    full = np.kron(op, np.eye(prod(dims[s] for s in rest), dtype=complex))
    # full is ordered (slots..., rest...); permute back to the global order
    order = slots + rest
    n = len(dims)
    shape = [dims[s] for s in order] * 2
    inv = np.argsort(order)
    axes = list(inv) + [n + i for i in inv]
    total = prod(dims)
    return full.reshape(shape).transpose(axes).reshape(total, total)


def partial_trace(m, keep: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep`` (kept in ascending order)."""
    m = as_matrix(m)
    keep = sorted(keep)
    _check_slots(keep, dims)
    if m.shape[0] != prod(dims):
        raise ValueError(f"matrix dimension {m.shape[0]} does not match dims {list(dims)}")
    n = len(dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for s in range(n):
        if s not in keep:
            col[s] = row[s]
    out = "".join(row[s] for s in keep) + "".join(col[s] for s in keep)
    spec = "".join(row) + "".join(col) + "->" + out
    d = prod(dims[s] for s in keep)
    return np.einsum(spec, m.reshape(list(dims) * 2)).reshape(d, d)


def _off_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def hermitian_eigen(m, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> HermitianEigen:
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    Each pivot (p, q) is first made real with a phase on column q, then
    annihilated with a real Givens rotation. Sweeps stop once the
    off-diagonal Frobenius norm drops below ``tol`` (scaled by the matrix
    norm when that exceeds one).
    """
    a = as_matrix(m).copy()
    if not is_hermitian(a):
        raise ValueError("hermitian_eigen requires a Hermitian matrix")
    a = (a + dagger(a)) / 2
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    threshold = tol * max(1.0, float(np.linalg.norm(a)))

    for _ in range(max_sweeps):
        if _off_norm(a) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = complex(a[p, q])
                r = abs(apq)
                if r <= 1e-300:
                    continue
                phase = apq / r
                theta = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                # U = diag(1, conj(phase)) @ [[c, s], [-s, c]] on the (p, q) block
                u10 = -s * phase.conjugate()
                u11 = c * phase.conjugate()
                for x in (a, v):
                    xp = x[:, p].copy()
                    xq = x[:, q]
                    x[:, p] = c * xp + u10 * xq
                    x[:, q] = s * xp + u11 * xq
                ap = a[p, :].copy()
                aq = a[q, :]
                a[p, :] = c * ap + u10.conjugate() * aq
                a[q, :] = s * ap + u11.conjugate() * aq
                a[p, q] = a[q, p] = 0.0
    else:
        if _off_norm(a) > threshold:
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")

    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return HermitianEigen(w[order], v[:, order])


def eigvalsh(m) -> np.ndarray:
    return hermitian_eigen(m).eigenvalues


def trace_norm(m) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(eigvalsh(m))))
