import math
from itertools import product

import numpy as np
import pytest

from zenobound.linalg import embed_on_subsystems, partial_trace, tensor
from zenobound.measures import BipartiteSplit, fidelity_to_psi_plus, negativity
from zenobound.states import ParameterError, is_density_matrix, sigma_alpha, sigma_free, z_projector
from zenobound.zeno import (
    PUBLISHED,
    DeadEndError,
    ProtocolConfig,
    apply_global_rotation,
    measure_bound_pair,
    measure_bound_pair_projective,
    party_projectors,
    rotation_z,
    run_multi_round,
    run_round,
    zeno_step,
)

from conftest import PRINTED_ONE_ITERATION, PRINTED_ROUND_STATES, printed_decimals, truncate, random_density

START = tensor(sigma_free(0.3), sigma_alpha(4))


class TestConfig:
    @pytest.mark.parametrize(
        "changes",
        [{"F": 1.0}, {"alpha": 1.5}, {"k": 0}, {"k": 2.5}, {"j_alice": (0, 3)},
         {"j_bob": (-1, 0)}, {"final_outcome": (1,)}, {"theta": math.inf}],
    )
    def test_validation(self, changes):
        with pytest.raises(ParameterError):
            PUBLISHED.replace(**changes)


class TestRotation:
    def test_identity(self):
        np.testing.assert_array_equal(rotation_z(0), np.eye(3))

    def test_one_degree(self):
        r = rotation_z(math.pi / 180).real
        assert r[0, 0] == pytest.approx(0.999848, abs=5e-7)
        assert r[1, 1] == pytest.approx(0.999848, abs=5e-7)
        assert r[0, 1] == pytest.approx(-0.0174524, abs=5e-8)
        assert r[1, 0] == pytest.approx(0.0174524, abs=5e-8)
        assert r[2, 2] == 1

    def test_inverse(self):
        np.testing.assert_allclose(rotation_z(0.3) @ rotation_z(-0.3), np.eye(3), atol=1e-15)

    def test_global_rotation_zero_angle(self):
        np.testing.assert_array_equal(apply_global_rotation(START, 0.0), START)

    def test_global_rotation_preserves_local_negativity(self):
        rho = apply_global_rotation(START, 0.37)
        assert abs(np.trace(rho) - 1) <= 1e-12
        for keep in ((0, 1), (2, 3)):
            before = partial_trace(START, keep, (3, 3, 3, 3))
            after = partial_trace(rho, keep, (3, 3, 3, 3))
            assert abs(negativity(after) - negativity(before)) <= 1e-10


class TestProjectors:
    def test_rank_and_algebra(self):
        cfg = PUBLISHED
        j0, ja, jb = party_projectors(cfg)
        assert np.linalg.matrix_rank(ja) == 9
        np.testing.assert_allclose(j0 + ja + jb - ja @ jb, np.eye(81), atol=1e-15)
        np.testing.assert_array_equal(ja @ jb, jb @ ja)
        for p in (j0, ja, jb):
            np.testing.assert_allclose(p @ p, p, atol=1e-12)
            np.testing.assert_allclose(p, p.conj().T, atol=1e-12)

    def test_alice_acts_on_her_two_particles(self):
        _, ja, _ = party_projectors(PUBLISHED)
        # |a_free b_free a_bound b_bound>; Alice's J1 fires iff a_free = 0 and a_bound = 1
        for af, bf, ab, bb in product(range(3), repeat=4):
            idx = 27 * af + 9 * bf + 3 * ab + bb
            assert ja[idx, idx] == (1.0 if (af, ab) == (0, 1) else 0.0)


class TestZenoStep:
    def test_first_survival(self):
        _, survival = zeno_step(START, PUBLISHED)
        assert survival > 0.78

    def test_trace_preserved(self):
        rho = START
        for _ in range(20):
            rho, _ = zeno_step(rho, PUBLISHED)
            assert abs(np.trace(rho) - 1) <= 1e-10
            assert np.linalg.eigvalsh(rho).min() >= -1e-9

    def test_zero_angle_no_overlap(self):
        # |11> free pair, |22> bound pair: J1 = |0><0| x |1><1| never fires
        basis = np.eye(9, dtype=complex)
        rho = tensor(np.outer(basis[4], basis[4]), np.outer(basis[8], basis[8]))
        out, survival = zeno_step(rho, PUBLISHED.replace(theta=0.0))
        assert survival == 1.0
        np.testing.assert_array_equal(out, rho)

    def test_dead_end(self):
        rho = tensor(np.diag([1, 0, 0, 0, 0, 0, 0, 0, 0]).astype(complex),
                     np.diag([1, 0, 0, 0, 0, 0, 0, 0, 0]).astype(complex))
        with pytest.raises(DeadEndError):
            zeno_step(rho, PUBLISHED.replace(theta=0.0, j_alice=(0, 0), j_bob=(2, 2)))


class TestMeasureBoundPair:
    def test_matches_projector_route(self):
        rho = random_density(np.random.default_rng(0), 81, rank=4)
        for outcome in product(range(3), repeat=2):
            fe, p = measure_bound_pair(rho, outcome)
            fe2, p2 = measure_bound_pair_projective(rho, outcome)
            np.testing.assert_allclose(fe, fe2, atol=1e-14)
            assert p == pytest.approx(p2, abs=1e-14)

    def test_completeness(self, published_trace):
        rho = published_trace.states[-1]
        total = sum(measure_bound_pair(rho, o)[1] for o in product(range(3), repeat=2))
        assert total == pytest.approx(1.0, abs=1e-10)

    def test_dead_outcome(self):
        basis = np.eye(9, dtype=complex)
        rho = tensor(sigma_free(0.3), np.outer(basis[4], basis[4]))
        assert measure_bound_pair(rho, (1, 1))[1] == pytest.approx(1.0)
        with pytest.raises(DeadEndError):
            measure_bound_pair(rho, (0, 0))


class TestRunRound:
    def test_published_round(self, published_trace):
        t = published_trace
        assert t.negativity == pytest.approx(0.171195, abs=5e-6)
        assert t.fidelity == pytest.approx(0.411667, abs=5e-6)
        assert t.outcome_probability == pytest.approx(0.04, abs=5e-3)
        assert t.survivals[0] > 0.78
        assert min(t.survivals[1:]) > 0.999

    def test_one_iteration_fidelity(self):
        t = run_round(sigma_free(0.3), PUBLISHED.replace(k=1))
        assert t.fidelity == pytest.approx(0.307696, abs=5e-6)

    def test_trace_invariants(self, published_trace):
        t = published_trace
        assert all(0 <= p <= 1 + 1e-12 for p in t.survivals + t.outcome_probabilities)
        assert t.cumulative_probability == pytest.approx(
            math.prod(t.survivals) * t.outcome_probability, abs=1e-12
        )
        for rho in t.states[::37]:
            assert is_density_matrix(rho)
        assert is_density_matrix(t.final_state)

    def test_stays_real(self, published_trace):
        for rho in published_trace.states:
            assert np.max(np.abs(rho.imag)) <= 1e-12
        assert np.max(np.abs(published_trace.final_state.imag)) <= 1e-12

    def test_probability_chain_oracle(self, published_trace):
        # unnormalized track: no renormalization anywhere
        cfg = PUBLISHED
        r = tensor(rotation_z(cfg.theta), rotation_z(cfg.theta), rotation_z(cfg.theta), rotation_z(cfg.theta))
        mask = np.ones((3, 3, 3, 3))
        mask[0, :, 1, :] = 0
        mask[:, 0, :, 1] = 0
        j0 = np.diag(mask.reshape(81))
        rho = START.copy()
        for _ in range(cfg.k):
            rho = j0 @ (r @ rho @ r.conj().T) @ j0
        p11 = embed_on_subsystems(tensor(z_projector(1), z_projector(1)), (2, 3), (3, 3, 3, 3))
        end_to_end = np.trace(p11 @ rho @ p11).real
        assert abs(published_trace.cumulative_probability - end_to_end) <= 1e-9

    def test_zero_angle_keeps_negativity(self):
        fe = sigma_free(0.3)
        t = run_round(fe, PUBLISHED.replace(theta=0.0, k=3, final_outcome=(0, 0)))
        assert abs(t.negativity - negativity(fe)) <= 1e-10

    def test_negativity_trajectory_formula_agreement(self, long_trace):
        from zenobound.measures import negativity_trace_norm
        for rho in (long_trace.final_state,):
            assert abs(negativity(rho) - negativity_trace_norm(rho)) <= 1e-10


class TestPublishedMatrices:
    def test_entries_truncate_to_printed_values(self, chain):
        """Each printed entry is the simulated value cut to its printed decimals, by truncation or rounding."""
        for printed_round, chain_round in ((1, 1), (2, 2), (3, 4), (4, 5)):
            sim = chain[chain_round - 1].state.real
            printed = PRINTED_ROUND_STATES[printed_round]
            for i, j in zip(*np.nonzero(printed)):
                d = printed_decimals(printed[i, j])
                candidates = (truncate(sim[i, j], d), round(sim[i, j], d))
                assert printed[i, j] == pytest.approx(candidates[0], abs=1e-12) or printed[i, j] == pytest.approx(
                    candidates[1], abs=1e-12
                ), (printed_round, i, j, sim[i, j])
            assert np.max(np.abs(sim - printed)) < 1e-5

    def test_one_iteration_entries(self):
        sim = run_round(sigma_free(0.3), PUBLISHED.replace(k=1)).final_state.real
        for i, j in zip(*np.nonzero(PRINTED_ONE_ITERATION)):
            if (i, j) == (7, 7):
                continue
            assert PRINTED_ONE_ITERATION[i, j] in (truncate(sim[i, j], 6), round(sim[i, j], 6))
        # the printed |21><21| entry repeats a sigma_alpha value; unit trace fixes it instead
        assert sim[7, 7] == pytest.approx(1 - sim[4, 4] - sim[5, 5] - sim[8, 8], abs=1e-12)
        assert sim[7, 7] == pytest.approx(0.000164, abs=5e-7)


class TestMultiRound:
    def test_negativity_strictly_increases(self, chain):
        negs = [r.negativity for r in chain]
        assert all(b > a for a, b in zip(negs, negs[1:]))

    def test_cumulative_probability(self, chain):
        assert chain[-1].cumulative_probability == pytest.approx(math.prod(r.probability for r in chain), rel=1e-12)

    def test_overrides(self):
        out = run_multi_round([PUBLISHED.replace(k=5)], F0=0.5, alpha=4.5)
        assert out[0].trace.config.F == 0.5
        assert out[0].trace.config.alpha == 4.5

    def test_empty(self):
        with pytest.raises(ValueError):
            run_multi_round([])
