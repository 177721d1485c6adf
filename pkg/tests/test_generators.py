"""Generator families: stochastic walks and the deterministic constructions."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rangewalk.core import validate_increment_bound
from rangewalk.generators import (
    DegeneratePlanError,
    MarkovIncrementChain,
    ReducibleChainError,
    ZigzagPlan,
    compute_n0,
    gen_birth_death,
    gen_ergodic_walk,
    gen_linear_drift,
    gen_simple_rw,
    gen_spiral2d,
    gen_tau_tent,
    gen_zigzag,
    is_stochastic,
    make_walk,
    mix_seed,
    splitmix64,
    stationary_distribution,
)


class TestSeeding:
    def test_splitmix64_is_64_bit(self):
        for x in (0, 1, 2**63, 2**64 - 1):
            assert 0 <= splitmix64(x) < 2**64

    def test_mix_seed_injective_in_index(self):
        seeds = {mix_seed(42, i) for i in range(10_000)}
        assert len(seeds) == 10_000

    def test_mix_seed_depends_on_master(self):
        assert mix_seed(1, 0) != mix_seed(2, 0)


class TestSimpleRW:
    def test_p_one_is_deterministic_drift(self):
        assert list(gen_simple_rw(1.0, 5, 123).positions(5)) == [0, 1, 2, 3, 4, 5]

    def test_p_zero(self):
        assert list(gen_simple_rw(0.0, 3, 5).positions(3)) == [0, -1, -2, -3]

    def test_replay_contract(self):
        a = gen_simple_rw(0.5, 100, 42).path_array(100)
        b = gen_simple_rw(0.5, 100, 42).path_array(100)
        assert np.array_equal(a, b)

    def test_p_out_of_range(self):
        with pytest.raises(ValueError):
            gen_simple_rw(1.5, 10, 0)

    def test_drift_metadata(self):
        assert gen_simple_rw(0.75, 10, 0).metadata.theoretical_drift == pytest.approx(0.5)


class TestStationaryDistribution:
    def test_symmetric_two_state(self):
        pi = stationary_distribution([[0.5, 0.5], [0.5, 0.5]])
        assert np.allclose(pi, [0.5, 0.5], atol=1e-12)

    def test_single_state(self):
        assert stationary_distribution([[1.0]]).tolist() == [1.0]

    def test_hand_solved_balance(self):
        pi = stationary_distribution([[0.9, 0.1], [0.3, 0.7]])
        assert np.allclose(pi, [0.75, 0.25], atol=1e-12)

    def test_reducible_rejected(self):
        with pytest.raises(ReducibleChainError):
            stationary_distribution(np.eye(2))

    def test_non_stochastic_rejected(self):
        with pytest.raises(ValueError):
            stationary_distribution([[0.5, 0.6], [0.5, 0.5]])

    def test_periodic_chain(self):
        pi = stationary_distribution([[0.0, 1.0], [1.0, 0.0]])
        assert np.allclose(pi, [0.5, 0.5], atol=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(2, 8), st.integers(0, 10**6))
    def test_residual_contract_on_random_chains(self, n, seed):
        rng = np.random.Generator(np.random.PCG64(seed))
        p = rng.random((n, n)) + 0.01  # strictly positive => irreducible
        p /= p.sum(axis=1, keepdims=True)
        p[:, -1] += 1.0 - p.sum(axis=1)  # exact row sums
        pi = stationary_distribution(p)
        assert np.max(np.abs(pi @ p - pi)) <= 1e-10
        assert abs(pi.sum() - 1.0) <= 1e-12


class TestMarkovIncrementChain:
    def test_iid_drift(self):
        assert MarkovIncrementChain.iid(0.7).drift == pytest.approx(0.4)

    def test_two_state_drift(self):
        # balance: pi_up * 0.1 = pi_down * 0.3 => pi = (0.75, 0.25), mean 0.5
        assert MarkovIncrementChain.two_state(0.1, 0.3).drift == pytest.approx(0.5)

    def test_bad_state_values(self):
        with pytest.raises(ValueError):
            MarkovIncrementChain(states=(2,), transition=[[1.0]])

    def test_reducible(self):
        with pytest.raises(ReducibleChainError):
            MarkovIncrementChain(states=(1, -1), transition=np.eye(2))

    def test_row_sum_tolerance(self):
        with pytest.raises(ValueError):
            MarkovIncrementChain(states=(1, -1), transition=[[0.6, 0.5], [0.5, 0.5]])


class TestErgodicWalk:
    def test_degenerate_single_state(self):
        chain = MarkovIncrementChain(states=(1,), transition=[[1.0]])
        assert list(gen_ergodic_walk(chain, 4, 0).positions(4)) == [0, 1, 2, 3, 4]

    def test_replay(self):
        chain = MarkovIncrementChain.two_state(0.2, 0.4)
        a = gen_ergodic_walk(chain, 500, 9).path_array(500)
        b = gen_ergodic_walk(chain, 500, 9).path_array(500)
        assert np.array_equal(a, b)

    def test_iid_drift_metadata_matches_srw(self):
        for p in (0.3, 0.5, 0.9):
            chain = MarkovIncrementChain.iid(p)
            walk = gen_ergodic_walk(chain, 10, 0)
            assert walk.metadata.theoretical_drift == pytest.approx(2 * p - 1)

    def test_increments_come_from_the_state_labels(self):
        chain = MarkovIncrementChain(
            states=(1, 0, -1),
            transition=[[0.2, 0.5, 0.3], [0.4, 0.2, 0.4], [0.3, 0.5, 0.2]],
        )
        x = gen_ergodic_walk(chain, 2000, 3).path_array(2000)
        assert set(np.unique(np.diff(x))) <= {-1, 0, 1}

    def test_gather_fallback_is_bit_identical(self, monkeypatch):
        import rangewalk.generators as G

        chain = MarkovIncrementChain.two_state(0.1, 0.3)
        default = gen_ergodic_walk(chain, 0, 5).path_array(5000)

        def no_numba():
            def gather_py(nxt, s0):
                rows = nxt.tolist()
                out = [0] * nxt.shape[1]
                s = int(s0)
                for k in range(nxt.shape[1]):
                    s = rows[s][k]
                    out[k] = s
                return np.asarray(out, dtype=np.int64)

            return gather_py

        monkeypatch.setattr(G, "_build_gather", no_numba)
        monkeypatch.setattr(G, "_GATHER", None)
        fallback = gen_ergodic_walk(chain, 0, 5).path_array(5000)
        assert np.array_equal(default, fallback)


class TestBirthDeath:
    def test_symmetric_replay(self):
        a = gen_birth_death("symmetric", 100, 4).path_array(100)
        b = gen_birth_death("symmetric", 100, 4).path_array(100)
        assert np.array_equal(a, b)
        assert set(np.unique(np.diff(a))) <= {-1, 1}

    def test_lazy_alpha_one_rejected(self):
        with pytest.raises(ValueError):
            gen_birth_death("lazy", 10, 0, alpha=1.0)

    def test_lazy_inline_param(self):
        x = gen_birth_death("lazy:0.5", 1000, 8).path_array(1000)
        assert 0 in np.diff(x)

    def test_reflected_steps_up_from_zero(self):
        x = gen_birth_death("reflected", 2000, 11).path_array(2000)
        assert (x >= 0).all()
        at_zero = np.flatnonzero(x[:-1] == 0)
        assert (x[at_zero + 1] == 1).all()

    def test_unknown_preset(self):
        with pytest.raises(ValueError):
            gen_birth_death("sticky", 10, 0)


class TestComputeN0:
    def test_half(self):
        assert compute_n0(0.5) == 0

    def test_large_ell(self):
        assert compute_n0(0.9) == 0

    def test_small_ell_found_by_iteration(self):
        # q = 11/9, factor 2/9: smallest n0 with (11/9)^n0 * 2/9 > 1 is 8
        assert compute_n0(0.1) == 8

    def test_out_of_range(self):
        for bad in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(ValueError):
                compute_n0(bad)

    def test_minimality(self):
        for ell in (0.05, 0.1, 0.2, 0.3, 0.47):
            n0 = compute_n0(ell)
            f = Fraction(ell)
            q = (1 + f) / (1 - f)
            factor = 2 * f / (1 - f)
            assert q**n0 * factor > 1
            if n0 > 0:
                assert q ** (n0 - 1) * factor <= 1


class TestZigzag:
    def test_first_seven_values(self):
        stream, _ = gen_zigzag(0.5, 20)
        assert list(stream.positions(6)) == [0, 1, 0, 1, 2, 1, 0]

    def test_peak_ratio_is_half_from_n1(self):
        _, plan = gen_zigzag(0.5, 1000)
        for n in range(1, 12):
            assert plan.peak_ratio(n) == Fraction(1, 2)
        # n = 0 excursion starts the walk: tau_{-1} = 0 makes the ratio 1
        assert plan.peak_ratio(0) == 1

    def test_exact_zeroes_and_peaks_within_horizon(self):
        steps = 2 * 3**7
        stream, plan = gen_zigzag(0.5, steps)
        x = stream.path_array(steps)
        for n, tau in enumerate(plan.tau):
            if tau <= steps:
                assert x[tau] == 0
                assert x[plan.t[n]] == (tau - plan.tau_at(n - 1)) // 2

    def test_ell_03_plan(self):
        _, plan = gen_zigzag(0.3, 12)
        assert plan.n0 == 1
        assert plan.tau[:3] == (2, 6, 12)
        assert plan.peak_ratio(2) == Fraction(3, 9)

    def test_half_matches_general_formula_with_n0_zero(self):
        _, plan = gen_zigzag(0.5, 100)
        q = Fraction(3)
        for n in range(10):
            power = q**n
            assert plan.tau_at(n) == 2 * (power.numerator // power.denominator)

    def test_ell_out_of_range(self):
        with pytest.raises(ValueError):
            gen_zigzag(0.0, 10)
        with pytest.raises(ValueError):
            gen_zigzag(1.0, 10)

    def test_plan_validation_rejects_bad_lists(self):
        with pytest.raises(DegeneratePlanError):
            ZigzagPlan(ell=0.5, n0=0, tau=(3,), t=(1,))  # odd tau
        with pytest.raises(DegeneratePlanError):
            ZigzagPlan(ell=0.5, n0=0, tau=(4, 2), t=(2, 3))  # not increasing
        with pytest.raises(DegeneratePlanError):
            ZigzagPlan(ell=0.5, n0=0, tau=(2, 6), t=(1, 5))  # t inconsistent
        with pytest.raises(DegeneratePlanError):
            ZigzagPlan(ell=0.1, n0=0, tau=(2,), t=(1,))  # Eq-(1) fails at n0=0

    def test_position_at_matches_iteration(self):
        stream, plan = gen_zigzag(0.3, 200)
        x = stream.path_array(200)
        for k in (0, 1, 5, 17, 60, 200):
            assert plan.position_at(k) == x[k]


class TestTauTent:
    def test_squares_odd_gap_excursion(self):
        # gap tau_2 - tau_1 = 3: rise 1, flat 1, fall 1 over times 1..4
        x = gen_tau_tent("squares", 16).path_array(16)
        assert x[1:5].tolist() == [0, 1, 1, 0]

    def test_squares_zeros_exactly_at_squares(self):
        x = gen_tau_tent("squares", 400).path_array(400)
        zeros = set(np.flatnonzero(x == 0).tolist())
        assert zeros == {k * k for k in range(21)}

    def test_geometric_three_ratio(self):
        x = gen_tau_tent("geometric:3", 200).path_array(200)
        zeros = np.flatnonzero(x == 0)
        pos = zeros[zeros > 0]
        assert (pos[1:] / pos[:-1] == 3).all()

    def test_near_one_c_is_degenerate(self):
        with pytest.raises(DegeneratePlanError):
            gen_tau_tent("geometric", 100, c=1.01)

    def test_unknown_rule(self):
        with pytest.raises(ValueError):
            gen_tau_tent("cubes", 10)

    def test_increments_stay_bounded(self):
        x = gen_tau_tent("squares", 1000).path_array(1000)
        assert set(np.unique(np.diff(x))) <= {-1, 0, 1}


class TestSpiral:
    def test_first_points(self):
        assert list(gen_spiral2d(3).positions(3)) == [(0, 0), (1, 0), (1, 1), (0, 1)]

    def test_distinct_points(self):
        path = gen_spiral2d(10_000).path_array(10_000)
        assert len({tuple(r) for r in path.tolist()}) == 10_001

    def test_unit_steps(self):
        path = gen_spiral2d(5_000).path_array(5_000)
        d = np.diff(path, axis=0)
        assert ((d * d).sum(axis=1) == 1).all()


class TestLinearDrift:
    def test_constant_two(self):
        w = gen_linear_drift(2, [2], 10)
        assert list(w.positions(4)) == [0, 2, 4, 6, 8]
        assert w.metadata.theoretical_drift == 2.0

    def test_alternating(self):
        w = gen_linear_drift(1, [1, -1], 10)
        assert list(w.positions(4)) == [0, 1, 0, 1, 0]
        assert w.metadata.theoretical_drift == 0.0

    def test_mean_of_pattern(self):
        assert gen_linear_drift(3, [3, 0, 0], 10).metadata.theoretical_drift == 1.0

    def test_entry_exceeding_m(self):
        with pytest.raises(ValueError):
            gen_linear_drift(2, [3], 10)

    def test_empty_pattern(self):
        with pytest.raises(ValueError):
            gen_linear_drift(1, [], 10)


def _all_generators(seed):
    chain = MarkovIncrementChain.two_state(0.1, 0.3)
    zz, _ = gen_zigzag(0.5, 3000)
    return [
        gen_simple_rw(0.7, 3000, seed),
        gen_ergodic_walk(chain, 3000, seed),
        gen_birth_death("symmetric", 3000, seed),
        gen_birth_death("lazy", 3000, seed, alpha=0.25),
        gen_birth_death("reflected", 3000, seed),
        zz,
        gen_tau_tent("squares", 3000),
        gen_tau_tent("geometric", 3000, c=2.5),
        gen_spiral2d(3000),
        gen_linear_drift(3, [3, -1, 0, 2], 3000),
    ]


@pytest.mark.parametrize("seed", [1, 77, 424242])
def test_every_generator_respects_its_declared_bound(seed):
    for stream in _all_generators(seed):
        path = stream.path_array(3000)
        assert validate_increment_bound(path, stream.m) is None, stream.metadata.generator_name


@given(st.integers(0, 2**64 - 1))
@settings(max_examples=20, deadline=None)
def test_srw_bound_property(seed):
    stream = gen_simple_rw(0.5, 256, seed)
    assert validate_increment_bound(stream.path_array(256), 1) is None


class TestMakeWalk:
    @pytest.mark.parametrize(
        "cfg",
        [
            {"gen": "srw", "p": 0.7, "steps": 50, "seed": 1},
            {"gen": "ergodic", "preset": "switch:0.1,0.3", "steps": 50, "seed": 1},
            {"gen": "ergodic", "preset": "iid:0.7", "steps": 50, "seed": 1},
            {"gen": "birth-death", "preset": "lazy:0.3", "steps": 50, "seed": 1},
            {"gen": "zigzag", "ell": 0.5, "steps": 50},
            {"gen": "tau-tent", "tau_rule": "geometric:3", "steps": 50},
            {"gen": "spiral2d", "steps": 50},
            {"gen": "linear-drift", "m": 2, "pattern": "2,-1", "steps": 50},
        ],
    )
    def test_roundtrip(self, cfg):
        stream = make_walk(cfg)
        assert stream.path_array(50).shape[0] == 51

    def test_seed_override(self):
        cfg = {"gen": "srw", "p": 0.5, "steps": 50, "seed": 1}
        a = make_walk(cfg, seed=9).path_array(50)
        b = make_walk({**cfg, "seed": 9}).path_array(50)
        assert np.array_equal(a, b)

    def test_stochastic_without_seed(self):
        with pytest.raises(ValueError):
            make_walk({"gen": "srw", "p": 0.5, "steps": 10})

    def test_unknown_gen(self):
        with pytest.raises(ValueError):
            make_walk({"gen": "levy", "steps": 10})

    def test_is_stochastic(self):
        assert is_stochastic({"gen": "srw"})
        assert not is_stochastic({"gen": "zigzag"})
