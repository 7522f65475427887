"""Closed-form recursion of the XOR-based activation protocol, used as a baseline."""

from __future__ import annotations

from typing import NamedTuple

from .states import ParameterError


class XorRoundResult(NamedTuple):
    F_next: float
    success_probability: float
    cumulative_probability: float


def _check(F: float, alpha: float) -> None:
    if not 0.0 < F < 1.0:
        raise ParameterError(f"F must lie in (0, 1), got {F}")
    if not 2.0 <= alpha <= 5.0:
        raise ParameterError(f"alpha must lie in [2, 5], got {alpha}")


def xor_round(F: float, alpha: float) -> XorRoundResult:
    """F' = 2F / (2F + (1-F)(5-alpha)), reached with probability (2F + (1-F)(5-alpha)) / 7."""
    _check(F, alpha)
    denom = 2.0 * F + (1.0 - F) * (5.0 - alpha)
    p = denom / 7.0
    return XorRoundResult(2.0 * F / denom, p, p)


def xor_trajectory(F0: float, alpha: float, rounds: int) -> list[XorRoundResult]:
    if rounds < 1:
        raise ParameterError(f"rounds must be >= 1, got {rounds}")
    out = []
    F, cumulative = F0, 1.0
    for _ in range(rounds):
        F_next, p, _ = xor_round(F, alpha)
        cumulative *= p
        out.append(XorRoundResult(F_next, p, cumulative))
        if F_next >= 1.0:
            break
        F = F_next
    return out
