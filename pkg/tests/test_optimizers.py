import numpy as np
import pytest

from sqopt import (
    AlgoSpec,
    expected_improvement,
    make_quadratic_family,
    run_many,
    run_ogq,
    run_saga,
    run_sgd,
    run_sgq,
    run_svrg,
)
from sqopt.exceptions import DivergenceError

ALPHA = 0.015


class TestSgd:
    def test_two_identical_components_deterministic(self):
        # identical components: every index gives the same step
        prob = make_quadratic_family([1, 1], [2, 2])
        tr = run_sgd(prob, 5.0, ALPHA, 3, np.random.default_rng(0))
        assert tr.x[1, 0] == pytest.approx(5 - ALPHA * 6)
        assert tr.queries[-1] == 3

    def test_zero_stepsize_constant(self, toy):
        tr = run_sgd(toy, 5.0, 0.0, 10, np.random.default_rng(0))
        assert np.all(tr.x == 5.0)
        assert np.all(tr.gap == 25.0)

    def test_mean_gap_decreases(self, toy):
        trs = run_many(AlgoSpec("sgd", ALPHA), toy, 5.0, 600, 200, 7)
        mean_gap = np.stack([t.gap for t in trs]).mean(axis=0)
        assert mean_gap.min() < 1.0

    def test_divergence_raises(self, toy):
        with pytest.raises(DivergenceError):
            run_sgd(toy, 5.0, 5.0, 200, np.random.default_rng(0))


class TestOgq:
    def test_first_step(self, toy):
        tr = run_ogq(toy, 5.0, ALPHA, 2)
        assert tr.selected[1] == 3
        assert tr.x[1, 0] == pytest.approx(5 - ALPHA * 14)

    def test_deterministic_replay(self, toy):
        a = run_ogq(toy, 5.0, ALPHA, 100)
        b = run_ogq(toy, 5.0, ALPHA, 100)
        assert np.array_equal(a.x, b.x)
        assert np.array_equal(a.selected, b.selected)

    def test_identical_components_match_full_gradient_descent(self):
        prob = make_quadratic_family([1, 1], [3, 3])
        tr = run_ogq(prob, 5.0, ALPHA, 50)
        x = np.array([5.0])
        for t in range(1, 51):
            x = x - ALPHA * prob.full_gradient(x)
            assert tr.x[t] == pytest.approx(x)

    def test_per_step_improvement_is_max_ei(self, toy):
        tr = run_ogq(toy, 5.0, ALPHA, 500)
        for t in range(500):
            max_ei = expected_improvement(toy, tr.x[t], ALPHA).ei.max()
            drop = toy.value(tr.x[t]) - toy.value(tr.x[t + 1])
            assert drop >= max_ei - 1e-9

    def test_steady_state_below_sgd(self, toy):
        T = 1200
        ogq = run_ogq(toy, 5.0, ALPHA, T)
        trs = run_many(AlgoSpec("sgd", ALPHA), toy, 5.0, T, 100, 3)
        sgd_mean = np.stack([t.gap for t in trs]).mean(axis=0)
        tail = slice(3 * T // 4, None)
        assert ogq.gap[tail].max() < sgd_mean[tail].mean()


class TestSgq:
    def test_query_accounting(self, toy):
        tr = run_sgq(toy, 5.0, ALPHA, 0.3, 50, np.random.default_rng(0))
        assert tr.queries[0] == toy.n
        assert tr.queries[-1] == toy.n + 50
        assert np.all(np.diff(tr.queries) == 1)

    def test_first_step_matches_ogq_when_not_exploring(self, toy):
        # find a seed whose first coin lands in the UCB branch
        for seed in range(20):
            rng = np.random.default_rng(seed)
            if rng.random() >= 0.3:
                tr = run_sgq(toy, 5.0, ALPHA, 0.3, 1, np.random.default_rng(seed))
                if not tr.explored[1]:
                    assert tr.selected[1] == 3
                    return
        pytest.fail("no non-exploring first step found")

    def test_explored_flag_matches_branch(self, toy):
        tr = run_sgq(toy, 5.0, ALPHA, 1.0, 20, np.random.default_rng(5))
        assert np.all(tr.explored[1:])

    def test_p1_matches_sgd_distribution(self, toy):
        trials, T = 200, 300
        sgd = run_many(AlgoSpec("sgd", ALPHA), toy, 5.0, T, trials, 11)
        sgq = run_many(AlgoSpec("sgq", ALPHA, p=1.0), toy, 5.0, T, trials, 12)
        g1 = np.stack([t.gap for t in sgd])
        g2 = np.stack([t.gap for t in sgq])
        ts = np.arange(0, T + 1, 10)
        se = np.sqrt(g1.std(0) ** 2 + g2.std(0) ** 2)[ts] / np.sqrt(trials)
        diff = np.abs(g1.mean(0) - g2.mean(0))[ts]
        assert np.all(diff <= 3 * se)

    def test_diagnostics_contain_ei_and_radii(self, toy):
        tr = run_sgq(toy, 5.0, ALPHA, 0.3, 10, np.random.default_rng(0),
                     diagnostics=True)
        assert len(tr.diagnostics) == 10
        for d in tr.diagnostics:
            assert d.ei_true.shape == (4,)
            assert d.ei_tilde.shape == (4,)
            assert np.all(d.radii >= 0)


class TestSaga:
    def test_query_accounting(self, toy):
        tr = run_saga(toy, 5.0, ALPHA, 30, np.random.default_rng(0))
        assert tr.queries[0] == toy.n
        assert tr.queries[-1] == toy.n + 30

    def test_first_step_is_full_gradient_step(self, toy):
        # fresh table: stored gradient cancels, leaving the full gradient
        for seed in range(5):
            tr = run_saga(toy, 5.0, ALPHA, 1, np.random.default_rng(seed))
            assert tr.x[1, 0] == pytest.approx(5 - ALPHA * 10)

    def test_fixed_point_at_optimum(self, toy):
        tr = run_saga(toy, toy.x_star, ALPHA, 5, np.random.default_rng(0))
        assert np.allclose(tr.x, toy.x_star[None, :])

    def test_linear_convergence_no_noise_floor(self, toy):
        trs = run_many(AlgoSpec("saga", ALPHA), toy, 5.0, 3000, 50, 13)
        mean_gap = np.stack([t.gap for t in trs]).mean(axis=0)
        assert mean_gap[-1] <= 1e-3


class TestSvrg:
    def test_query_accounting(self, toy):
        tr = run_svrg(toy, 5.0, ALPHA, 25, 10, np.random.default_rng(0))
        # snapshots at t = 0, 10, 20: three times n extra queries
        assert tr.queries[-1] == 25 + 3 * toy.n
        assert tr.queries[1] == toy.n + 1

    def test_snapshot_every_1_is_exact_gradient_descent(self, toy):
        tr = run_svrg(toy, 5.0, ALPHA, 30, 1, np.random.default_rng(0))
        x = np.array([5.0])
        for t in range(1, 31):
            x = x - ALPHA * toy.full_gradient(x)
            assert tr.x[t] == pytest.approx(x)

    def test_fixed_point_at_optimum(self, toy):
        tr = run_svrg(toy, toy.x_star, ALPHA, 5, 2, np.random.default_rng(0))
        assert np.allclose(tr.x, toy.x_star[None, :])

    def test_linear_convergence_no_noise_floor(self, toy):
        trs = run_many(AlgoSpec("svrg", ALPHA, snapshot_every=10), toy, 5.0,
                       3000, 50, 14)
        mean_gap = np.stack([t.gap for t in trs]).mean(axis=0)
        assert mean_gap[-1] <= 1e-3


class TestRunMany:
    def test_deterministic_algorithms_identical(self, toy):
        trs = run_many(AlgoSpec("ogq", ALPHA), toy, 5.0, 50, 5, 0)
        for tr in trs[1:]:
            assert np.array_equal(tr.x, trs[0].x)

    def test_seeding_contract(self, toy):
        a = run_many(AlgoSpec("sgd", ALPHA), toy, 5.0, 50, 10, 99)
        b = run_many(AlgoSpec("sgd", ALPHA), toy, 5.0, 50, 10, 99)
        for ta, tb in zip(a, b):
            assert np.array_equal(ta.x, tb.x)

    def test_std_shrinks_with_trials(self, toy):
        big = run_many(AlgoSpec("sgd", ALPHA), toy, 5.0, 200, 200, 4)
        small = run_many(AlgoSpec("sgd", ALPHA), toy, 5.0, 200, 50, 4)
        t = 100
        se_big = np.std([tr.gap[t] for tr in big]) / np.sqrt(200)
        se_small = np.std([tr.gap[t] for tr in small]) / np.sqrt(50)
        assert se_big < se_small

    def test_divergence_recorded_not_fatal(self, toy):
        trs = run_many(AlgoSpec("sgd", 5.0), toy, 5.0, 200, 3, 0)
        assert all(tr.diverged_at is not None for tr in trs)

    def test_parallel_matches_serial(self, toy):
        serial = run_many(AlgoSpec("sgd", ALPHA), toy, 5.0, 50, 8, 5, n_jobs=1)
        parallel = run_many(AlgoSpec("sgd", ALPHA), toy, 5.0, 50, 8, 5, n_jobs=2)
        for ts, tp in zip(serial, parallel):
            assert np.array_equal(ts.x, tp.x)


class TestAlgoSpec:
    def test_sgq_requires_p(self):
        with pytest.raises(ValueError):
            AlgoSpec("sgq", 0.01)
        with pytest.raises(ValueError):
            AlgoSpec("sgq", 0.01, p=1.5)

    def test_svrg_requires_snapshot_every(self):
        with pytest.raises(ValueError):
            AlgoSpec("svrg", 0.01)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            AlgoSpec("adam", 0.01)
