"""Brute-force search over threshold-measurement levels, iteration count and final outcome."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import NamedTuple, Sequence

from .measures import fidelity_to_psi_plus, negativity
from .states import ParameterError, sigma_free
from .zeno import DeadEndError, ProtocolConfig, iterate_protocol, measure_bound_pair, run_round

ALL_PAIRS = tuple(product(range(3), repeat=2))
OBJECTIVES = ("max_negativity", "max_negativity_times_probability")


@dataclass(frozen=True)
class SweepSpec:
    F: float = 0.3
    alpha: float = 4.0
    theta: float = math.pi / 180
    pairs: tuple[tuple[int, int], ...] = ALL_PAIRS
    # None means both parties use the same (i, j)
    bob_pairs: tuple[tuple[int, int], ...] | None = None
    k_min: int = 1
    k_max: int = 300
    outcomes: tuple[tuple[int, int], ...] = ALL_PAIRS
    objective: str = "max_negativity"

    def __post_init__(self):
        if not self.pairs or not self.outcomes or (self.bob_pairs is not None and not self.bob_pairs):
            raise ParameterError("candidate sets must be non-empty")
        if not 1 <= self.k_min <= self.k_max:
            raise ParameterError(f"invalid k range {self.k_min}..{self.k_max}")
        if self.objective not in OBJECTIVES:
            raise ParameterError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        # validates F, alpha, theta and every index
        for pa, pb in self.party_pairs():
            for outcome in self.outcomes:
                self.config(pa, pb, self.k_max, outcome)

    def party_pairs(self) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        if self.bob_pairs is None:
            return [(p, p) for p in self.pairs]
        return list(product(self.pairs, self.bob_pairs))

    def config(self, j_alice, j_bob, k, outcome) -> ProtocolConfig:
        return ProtocolConfig(
            F=self.F, alpha=self.alpha, theta=self.theta,
            j_alice=tuple(j_alice), j_bob=tuple(j_bob), k=k, final_outcome=tuple(outcome),
        )


class SweepCell(NamedTuple):
    j_alice: tuple[int, int]
    j_bob: tuple[int, int]
    k: int
    outcome: tuple[int, int]
    negativity: float
    fidelity: float
    probability: float  # survivals up to k times the outcome probability
    ok: bool


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    best: ProtocolConfig
    best_negativity: float
    best_fidelity: float
    best_probability: float
    table: tuple[SweepCell, ...] = field(repr=False)


def score(cell: SweepCell, objective: str) -> float:
    if objective == "max_negativity":
        return cell.negativity
    return cell.negativity * cell.probability


def _evaluate_pair(spec: SweepSpec, j_alice, j_bob) -> list[SweepCell]:
    cfg = spec.config(j_alice, j_bob, spec.k_max, spec.outcomes[0])
    cells = []
    survival_product = 1.0
    k_reached = 0
    try:
        for k, rho, survival in iterate_protocol(sigma_free(spec.F), cfg):
            k_reached = k
            survival_product *= survival
            if k < spec.k_min:
                continue
            for outcome in spec.outcomes:
                try:
                    fe, p = measure_bound_pair(rho, outcome)
                except DeadEndError:
                    cells.append(SweepCell(j_alice, j_bob, k, outcome, math.nan, math.nan, 0.0, False))
                    continue
                cells.append(
                    SweepCell(j_alice, j_bob, k, outcome, negativity(fe), fidelity_to_psi_plus(fe),
                              survival_product * p, True)
                )
    except DeadEndError:
        # the threshold measurement itself killed the branch; later k are dead too
        for k in range(max(k_reached + 1, spec.k_min), spec.k_max + 1):
            for outcome in spec.outcomes:
                cells.append(SweepCell(j_alice, j_bob, k, outcome, math.nan, math.nan, 0.0, False))
    return cells


def _evaluate_star(args):
    return _evaluate_pair(*args)


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Evaluate every candidate cell and return the argmax under ``spec.objective``.

    One trajectory is simulated per (Alice, Bob) level pair and read out at
    every k. Ties go to the smaller k, then lexicographic (j_alice, j_bob,
    outcome). ``workers > 1`` spreads the level pairs over processes; the
    table order and contents do not depend on it.
    """
    jobs = [(spec, pa, pb) for pa, pb in spec.party_pairs()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_evaluate_star, jobs))
    else:
        chunks = [_evaluate_star(job) for job in jobs]
    table = tuple(cell for chunk in chunks for cell in chunk)
    live = [c for c in table if c.ok]
    if not live:
        raise DeadEndError("every cell of the sweep is a dead end")
    best = min(
        live,
        key=lambda c: (-score(c, spec.objective), c.k, c.j_alice, c.j_bob, c.outcome),
    )
    return SweepResult(
        spec=spec,
        best=spec.config(best.j_alice, best.j_bob, best.k, best.outcome),
        best_negativity=best.negativity,
        best_fidelity=best.fidelity,
        best_probability=best.probability,
        table=table,
    )


def activation_window(result: SweepResult, threshold: float) -> list[int]:
    """Iteration counts where the best (levels, outcome) beats ``threshold`` negativity."""
    b = result.best
    return [
        c.k for c in result.table
        if c.ok and c.j_alice == b.j_alice and c.j_bob == b.j_bob
        and c.outcome == b.final_outcome and c.negativity > threshold
    ]


class TrajectoryRow(NamedTuple):
    k: int
    negativity: float
    fidelity: float
    cumulative_probability: float


def trajectory_export(cfg: ProtocolConfig, k_max: int, fe_in=None) -> list[TrajectoryRow]:
    """One row per iteration count 1..k_max for ``cfg``'s levels and final outcome."""
    fe_in = sigma_free(cfg.F) if fe_in is None else fe_in
    trace = run_round(fe_in, cfg.replace(k=k_max), keep_states=False)
    return [
        TrajectoryRow(k, n, f, p)
        for k, n, f, p in zip(
            range(1, k_max + 1), trace.negativities, trace.fidelities, trace.cumulative_probabilities
        )
    ]


def zero_bands(rows: Sequence[TrajectoryRow], tol: float = 1e-6) -> list[tuple[int, int]]:
    """Maximal runs of consecutive k where the negativity is below ``tol``."""
    bands: list[tuple[int, int]] = []
    for row in rows:
        if not row.negativity < tol:
            continue
        if bands and bands[-1][1] == row.k - 1:
            bands[-1] = (bands[-1][0], row.k)
        else:
            bands.append((row.k, row.k))
    return bands
