"""Partial transpose, negativity, fidelity and the Peres (PPT) test."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import prod

import numpy as np

from .linalg import as_matrix, eigvalsh, trace_norm
from .states import psi_plus

NEG_CUTOFF = 1e-10
FORMULA_AGREEMENT = 1e-10


@dataclass(frozen=True)
class BipartiteSplit:
    """Subsystem dimensions plus the slots that make up party A."""

    dims: tuple[int, ...] = (3, 3)
    a_slots: tuple[int, ...] = (0,)

    def __post_init__(self):
        if not self.dims or any(d < 1 for d in self.dims):
            raise ValueError(f"invalid subsystem dimensions {self.dims}")
        if len(set(self.a_slots)) != len(self.a_slots):
            raise ValueError(f"duplicate slots in {self.a_slots}")
        if any(not 0 <= s < len(self.dims) for s in self.a_slots):
            raise ValueError(f"slots {self.a_slots} out of range for {len(self.dims)} subsystems")

    @property
    def b_slots(self) -> tuple[int, ...]:
        return tuple(s for s in range(len(self.dims)) if s not in self.a_slots)

    @property
    def dim_a(self) -> int:
        return prod(self.dims[s] for s in self.a_slots)

    @property
    def dim_b(self) -> int:
        return prod(self.dims[s] for s in self.b_slots)

    def swapped(self) -> "BipartiteSplit":
        return BipartiteSplit(self.dims, self.b_slots)


TWO_QUTRITS = BipartiteSplit()


class PPTClass(str, Enum):
    PPT = "PPT"
    NPT = "NPT"


def partial_transpose(rho, split: BipartiteSplit = TWO_QUTRITS) -> np.ndarray:
    rho = as_matrix(rho)
    n = len(split.dims)
    total = prod(split.dims)
    if rho.shape[0] != total:
        raise ValueError(f"state dimension {rho.shape[0]} does not match split {split.dims}")
    axes = list(range(2 * n))
    for s in split.a_slots:
        axes[s], axes[n + s] = axes[n + s], axes[s]
    return rho.reshape(list(split.dims) * 2).transpose(axes).reshape(total, total)


def _negativities(rho, split: BipartiteSplit) -> tuple[float, float]:
    mu = eigvalsh(partial_transpose(rho, split))
    by_sum = float(-np.sum(mu[mu < -NEG_CUTOFF]))
    by_norm = (float(np.sum(np.abs(mu))) - 1.0) / 2.0
    return by_sum, by_norm


def negativity_trace_norm(rho, split: BipartiteSplit = TWO_QUTRITS) -> float:
    """(||rho^T_A||_1 - 1) / 2."""
    return (trace_norm(partial_transpose(rho, split)) - 1.0) / 2.0


def negativity(rho, split: BipartiteSplit = TWO_QUTRITS) -> float:
    """Absolute sum of the negative eigenvalues of the partial transpose.

    Both the eigenvalue-sum and trace-norm forms are evaluated from the same
    spectrum; they must agree within 1e-10 or an ``ArithmeticError`` is
    raised. Eigenvalues in (-1e-10, 0) are treated as zero.
    """
    by_sum, by_norm = _negativities(rho, split)
    if abs(by_sum - by_norm) > FORMULA_AGREEMENT:
        raise ArithmeticError(
            f"negativity formulas disagree: {by_sum!r} vs {by_norm!r}"
        )
    return by_sum


def fidelity_to_psi_plus(rho) -> float:
    rho = as_matrix(rho)
    if rho.shape != (9, 9):
        raise ValueError(f"fidelity_to_psi_plus needs a 9x9 state, got {rho.shape}")
    psi = psi_plus()
    return float(np.real(psi.conj() @ rho @ psi))


def classify_ppt(rho, split: BipartiteSplit = TWO_QUTRITS) -> PPTClass:
    # PPT does not imply separable for 3x3 systems; this is the Peres test only
    mu = eigvalsh(partial_transpose(rho, split))
    return PPTClass.PPT if mu[0] >= -NEG_CUTOFF else PPTClass.NPT
