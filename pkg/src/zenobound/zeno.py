"""Local rotate-measure (Zeno) dynamics on a free pair plus a bound pair.

The four qutrits are ordered ``(A_free, B_free, A_bound, B_bound)``, i.e. the
joint state is ``fe ⊗ be``. Alice holds slots 0 and 2, Bob holds 1 and 3.
Each party's threshold measurement acts on (own free particle, own bound
particle): ``J1 = |i><i| ⊗ |j><j|`` with ``i`` on the free particle.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .linalg import as_matrix, dagger, embed_on_subsystems, partial_trace, tensor
from .measures import fidelity_to_psi_plus, negativity
from .states import ParameterError, sigma_alpha, sigma_free, z_projector

DIMS = (3, 3, 3, 3)
A_FREE, B_FREE, A_BOUND, B_BOUND = range(4)
DEAD_END = 1e-12


class DeadEndError(ArithmeticError):
    """The conditioned branch has (numerically) zero probability."""


def _check_pair(name: str, pair) -> tuple[int, int]:
    pair = tuple(int(x) for x in pair)
    if len(pair) != 2 or any(x not in (0, 1, 2) for x in pair):
        raise ParameterError(f"{name} must be two levels in {{0, 1, 2}}, got {pair}")
    return pair


@dataclass(frozen=True)
class ProtocolConfig:
    F: float = 0.3
    alpha: float = 4.0
    theta: float = math.pi / 180
    j_alice: tuple[int, int] = (0, 1)
    j_bob: tuple[int, int] = (0, 1)
    k: int = 262
    final_outcome: tuple[int, int] = (1, 1)

    def __post_init__(self):
        if not 0.0 < self.F < 1.0:
            raise ParameterError(f"F must lie in (0, 1), got {self.F}")
        if not 2.0 <= self.alpha <= 5.0:
            raise ParameterError(f"alpha must lie in [2, 5], got {self.alpha}")
        if not math.isfinite(self.theta):
            raise ParameterError(f"theta must be finite, got {self.theta}")
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 1:
            raise ParameterError(f"k must be a positive integer, got {self.k}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "j_alice", _check_pair("j_alice", self.j_alice))
        object.__setattr__(self, "j_bob", _check_pair("j_bob", self.j_bob))
        object.__setattr__(self, "final_outcome", _check_pair("final_outcome", self.final_outcome))

    def replace(self, **changes) -> "ProtocolConfig":
        return dataclasses.replace(self, **changes)


PUBLISHED = ProtocolConfig()


@dataclass(frozen=True)
class RoundTrace:
    """Record of one round; index ``n`` of each per-iteration tuple is iteration ``n + 1``."""

    config: ProtocolConfig
    survivals: tuple[float, ...]
    outcome_probabilities: tuple[float, ...]
    negativities: tuple[float, ...]
    fidelities: tuple[float, ...]
    cumulative_probabilities: tuple[float, ...]
    final_state: np.ndarray
    outcome_probability: float
    cumulative_probability: float
    states: tuple[np.ndarray, ...] = field(default=(), repr=False)

    @property
    def negativity(self) -> float:
        return self.negativities[-1]

    @property
    def fidelity(self) -> float:
        return self.fidelities[-1]


@dataclass(frozen=True)
class RoundOutcome:
    state: np.ndarray
    negativity: float
    fidelity: float
    probability: float
    cumulative_probability: float
    trace: RoundTrace = field(repr=False)


def _frozen(m: np.ndarray) -> np.ndarray:
    m.flags.writeable = False
    return m


def rotation_z(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]], dtype=complex)


@lru_cache(maxsize=64)
def _global_rotation(theta: float) -> np.ndarray:
    r = rotation_z(theta)
    return _frozen(tensor(r, r, r, r))


def apply_global_rotation(rho, theta: float) -> np.ndarray:
    """Conjugate an 81x81 state by R(theta) on every qutrit."""
    rho = as_matrix(rho)
    if rho.shape != (81, 81):
        raise ValueError(f"expected a 4-qutrit (81x81) state, got {rho.shape}")
    u = _global_rotation(float(theta))
    return u @ rho @ dagger(u)


@lru_cache(maxsize=128)
def _projectors(j_alice: tuple[int, int], j_bob: tuple[int, int]):
    ia, ja = j_alice
    ib, jb = j_bob
    j1_alice = embed_on_subsystems(tensor(z_projector(ia), z_projector(ja)), (A_FREE, A_BOUND), DIMS)
    j1_bob = embed_on_subsystems(tensor(z_projector(ib), z_projector(jb)), (B_FREE, B_BOUND), DIMS)
    eye = np.eye(81, dtype=complex)
    j0 = (eye - j1_alice) @ (eye - j1_bob)
    return _frozen(j0), _frozen(j1_alice), _frozen(j1_bob)


def party_projectors(cfg: ProtocolConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(J0_global, J1_alice, J1_bob)`` as 81x81 matrices."""
    return _projectors(cfg.j_alice, cfg.j_bob)


def zeno_step(rho, cfg: ProtocolConfig) -> tuple[np.ndarray, float]:
    """One rotate-measure iteration conditioned on both parties seeing J0."""
    rho = apply_global_rotation(rho, cfg.theta)
    j0 = party_projectors(cfg)[0]
    projected = j0 @ rho @ j0
    survival = float(np.real(np.trace(projected)))
    if survival < DEAD_END:
        raise DeadEndError(f"survival probability {survival:.3e} below {DEAD_END}")
    return projected / survival, survival


def measure_bound_pair(rho, outcome: Sequence[int]) -> tuple[np.ndarray, float]:
    """Condition on z-outcomes ``(a, b)`` of the bound pair and return the free pair.

    Returns the normalized 9x9 free-pair state and the outcome probability.
    """
    rho = as_matrix(rho)
    if rho.shape != (81, 81):
        raise ValueError(f"expected a 4-qutrit (81x81) state, got {rho.shape}")
    a, b = _check_pair("outcome", outcome)
    # <a b| rho |a b> on the bound slots, which is P rho P traced over them
    block = rho.reshape(DIMS * 2)[:, :, a, b, :, :, a, b].reshape(9, 9)
    prob = float(np.real(np.trace(block)))
    if prob < DEAD_END:
        raise DeadEndError(f"outcome {(a, b)} has probability {prob:.3e}")
    return block / prob, prob


def measure_bound_pair_projective(rho, outcome: Sequence[int]) -> tuple[np.ndarray, float]:
    """Same as ``measure_bound_pair`` via explicit projector embedding and partial trace."""
    a, b = _check_pair("outcome", outcome)
    p = embed_on_subsystems(tensor(z_projector(a), z_projector(b)), (A_BOUND, B_BOUND), DIMS)
    unnorm = p @ as_matrix(rho) @ p
    prob = float(np.real(np.trace(unnorm)))
    if prob < DEAD_END:
        raise DeadEndError(f"outcome {(a, b)} has probability {prob:.3e}")
    return partial_trace(unnorm, (A_FREE, B_FREE), DIMS) / prob, prob


def iterate_protocol(fe_in, cfg: ProtocolConfig, k_max: int | None = None) -> Iterator[tuple[int, np.ndarray, float]]:
    """Yield ``(k, state_after_k_steps, survival_k)`` for k = 1..k_max."""
    fe_in = as_matrix(fe_in)
    if fe_in.shape != (9, 9):
        raise ValueError(f"free pair must be 9x9, got {fe_in.shape}")
    rho = tensor(fe_in, sigma_alpha(cfg.alpha))
    for k in range(1, (cfg.k if k_max is None else k_max) + 1):
        rho, survival = zeno_step(rho, cfg)
        yield k, rho, survival


def run_round(fe_in, cfg: ProtocolConfig, keep_states: bool = True) -> RoundTrace:
    """Run ``cfg.k`` rotate-measure steps on ``fe_in ⊗ sigma_alpha`` and measure the bound pair.

    The conditional free-pair state under ``cfg.final_outcome`` is evaluated
    after every iteration on a copy; iterations where that outcome is dead
    record NaN. The final measurement at ``cfg.k`` raises ``DeadEndError``
    if its probability is below 1e-12.
    """
    survivals, probs, negs, fids, cums, states = [], [], [], [], [], []
    survival_product = 1.0
    final = None
    for k, rho, survival in iterate_protocol(fe_in, cfg):
        survivals.append(survival)
        survival_product *= survival
        if keep_states:
            states.append(rho)
        try:
            fe, p = measure_bound_pair(rho, cfg.final_outcome)
        except DeadEndError:
            if k == cfg.k:
                raise
            probs.append(0.0)
            negs.append(math.nan)
            fids.append(math.nan)
            cums.append(0.0)
            continue
        probs.append(p)
        negs.append(negativity(fe))
        fids.append(fidelity_to_psi_plus(fe))
        cums.append(survival_product * p)
        final = fe
    return RoundTrace(
        config=cfg,
        survivals=tuple(survivals),
        outcome_probabilities=tuple(probs),
        negativities=tuple(negs),
        fidelities=tuple(fids),
        cumulative_probabilities=tuple(cums),
        final_state=final,
        outcome_probability=probs[-1],
        cumulative_probability=cums[-1],
        states=tuple(states),
    )


def run_multi_round(
    rounds: Sequence[ProtocolConfig],
    F0: float | None = None,
    alpha: float | None = None,
    keep_states: bool = False,
) -> list[RoundOutcome]:
    """Chain rounds, feeding each output free pair into the next with a fresh bound pair.

    ``F0`` and ``alpha`` default to the first config's values; when given
    they override every round's ``F`` / ``alpha``.
    """
    if not rounds:
        raise ValueError("need at least one round")
    F0 = rounds[0].F if F0 is None else F0
    fe = sigma_free(F0)
    cumulative = 1.0
    out = []
    for cfg in rounds:
        cfg = cfg.replace(F=F0, alpha=cfg.alpha if alpha is None else alpha)
        trace = run_round(fe, cfg, keep_states=keep_states)
        cumulative *= trace.cumulative_probability
        fe = trace.final_state
        out.append(
            RoundOutcome(
                state=fe,
                negativity=trace.negativity,
                fidelity=trace.fidelity,
                probability=trace.cumulative_probability,
                cumulative_probability=cumulative,
                trace=trace,
            )
        )
    return out
