import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from sqopt import (
    SurrogateTable,
    error_radius,
    expected_improvement,
    select_oracle,
    select_ucb,
    select_uniform,
    surrogate_expected_improvement,
)
from sqopt.exceptions import NumericalError

ALPHA = 0.015


class TestExpectedImprovement:
    # at x=5: full gradient 10, component gradients {6, 8, 12, 14}
    def test_toy_values(self, toy):
        bd = expected_improvement(toy, 5.0, ALPHA)
        assert bd.ei[3] == pytest.approx(0.015 * 10 * 14 - 0.000225 * 196, abs=1e-12)
        assert bd.ei[3] == pytest.approx(2.0559, abs=1e-12)
        assert bd.ei[0] == pytest.approx(0.8919, abs=1e-12)

    def test_breakdown_consistency(self, toy, rng):
        for _ in range(50):
            x = rng.uniform(-6, 6, size=1)
            bd = expected_improvement(toy, x, ALPHA)
            recomposed = ALPHA * bd.inner - 0.5 * ALPHA**2 * toy.L * bd.norm_sq
            assert np.allclose(bd.ei, recomposed, rtol=1e-12)

    def test_nonpositive_at_minimizer(self, toy):
        bd = expected_improvement(toy, toy.x_star, ALPHA)
        expected = -0.5 * ALPHA**2 * toy.L * bd.norm_sq
        assert np.allclose(bd.ei, expected, atol=1e-15)
        assert np.all(bd.ei <= 0)

    def test_rejects_nonpositive_alpha(self, toy):
        with pytest.raises(ValueError):
            expected_improvement(toy, 5.0, 0.0)

    def test_descent_lemma(self, toy, rng):
        # improvement from stepping along any component is at least its EI
        for _ in range(200):
            x = rng.uniform(-6, 6, size=1)
            bd = expected_improvement(toy, x, ALPHA)
            for i in range(toy.n):
                step = x - ALPHA * toy.component_gradient(i, x)
                drop = toy.value(x) - toy.value(step)
                assert drop >= bd.ei[i] - 1e-9


class TestSurrogateTable:
    def test_initialize_matches_truth(self, toy):
        table = SurrogateTable.initialize(toy, 5.0)
        assert np.allclose(table.tilde_grads[:, 0], [6, 8, 12, 14])
        assert np.all(table.tau == 0)
        bd = surrogate_expected_improvement(table, ALPHA, toy.L)
        true_bd = expected_improvement(toy, 5.0, ALPHA)
        assert np.allclose(bd.ei, true_bd.ei, rtol=1e-14)
        assert bd.ei[3] == pytest.approx(2.0559, abs=1e-12)

    def test_update_overwrites_only_selected(self, toy):
        table = SurrogateTable.initialize(toy, 5.0)
        x_new = np.array([4.0])
        table.update(1, toy.component_gradient(1, x_new), 7, x_new)
        assert table.tau[1] == 7 and np.all(table.tau[[0, 2, 3]] == 0)
        assert table.tilde_grads[1, 0] == pytest.approx(6.0)
        assert table.tilde_grads[0, 0] == pytest.approx(6.0)  # unchanged entry
        # stored gradients always equal the true gradient at their anchor
        for i in range(table.n):
            expected = toy.component_gradient(i, table.anchors[i])
            assert np.allclose(table.tilde_grads[i], expected)

    def test_zero_table_gives_zero_ei(self, toy):
        table = SurrogateTable.initialize(toy, 5.0)
        table.tilde_grads[:] = 0.0
        bd = surrogate_expected_improvement(table, ALPHA, toy.L)
        assert np.all(bd.ei == 0.0)


class TestErrorRadius:
    def test_zero_when_anchors_current(self, toy):
        table = SurrogateTable.initialize(toy, 5.0)
        radii = error_radius(table, 5.0, ALPHA, toy.L, toy.smoothness_constants)
        assert np.all(radii == 0.0)

    def test_toy_displaced(self, toy):
        table = SurrogateTable.initialize(toy, 5.0)
        radii = error_radius(table, 4.9, ALPHA, toy.L, toy.smoothness_constants)
        # direct evaluation with eps_i = 0.2 for every user
        eps, eps_bar = 0.2, 0.2
        expected = []
        for g in [6.0, 8.0, 12.0, 14.0]:
            expected.append(
                (ALPHA * 10 + ALPHA**2 * 2 * g) * eps
                + ALPHA * g * eps_bar
                + ALPHA * eps * eps_bar
                + 0.5 * ALPHA**2 * 2 * eps**2
            )
        assert np.allclose(radii, expected, rtol=1e-10)
        assert radii[3] == pytest.approx(0.073869, abs=1e-6)

    def test_doubling_smoothness_at_least_doubles(self, toy):
        table = SurrogateTable.initialize(toy, 5.0)
        base = error_radius(table, 4.5, ALPHA, toy.L, toy.smoothness_constants)
        doubled = error_radius(table, 4.5, ALPHA, toy.L, 2 * toy.smoothness_constants)
        assert np.all(doubled >= 2 * base)

    def test_staleness_error_bounded(self, toy, rng):
        # the radius really bounds |EI - surrogate EI| along random walks
        table = SurrogateTable.initialize(toy, 5.0)
        x = np.array([5.0])
        for t in range(1, 50):
            x = x + rng.uniform(-0.1, 0.1, size=1)
            i = int(rng.integers(toy.n))
            radii = error_radius(table, x, ALPHA, toy.L, toy.smoothness_constants)
            true_ei = expected_improvement(toy, x, ALPHA).ei
            tilde_ei = surrogate_expected_improvement(table, ALPHA, toy.L).ei
            assert np.all(np.abs(true_ei - tilde_ei) <= radii + 1e-9)
            table.update(i, toy.component_gradient(i, x), t, x)


class TestSelection:
    def test_uniform_single(self, rng):
        assert select_uniform(rng, 1) == 0

    def test_uniform_frequencies(self):
        rng = np.random.default_rng(0)
        draws = np.array([select_uniform(rng, 4) for _ in range(100_000)])
        freqs = np.bincount(draws, minlength=4) / draws.size
        assert np.all(np.abs(freqs - 0.25) < 0.006)

    def test_uniform_replay(self):
        a = [select_uniform(np.random.default_rng(9), 7) for _ in range(20)]
        b = [select_uniform(np.random.default_rng(9), 7) for _ in range(20)]
        assert a == b

    def test_oracle_toy(self, toy):
        assert select_oracle(expected_improvement(toy, 5.0, ALPHA)) == 3
        assert select_oracle(expected_improvement(toy, -5.0, ALPHA)) == 0

    def test_oracle_tie_break(self):
        assert select_oracle(np.array([1.0, 1.0, 1.0])) == 0

    def test_oracle_rejects_nan(self):
        with pytest.raises(NumericalError):
            select_oracle(np.array([1.0, np.nan]))

    def test_ucb(self):
        assert select_ucb(np.array([1.0, 1.0]), np.array([0.0, 0.5])) == 1
        assert select_ucb(np.array([2.0, 1.0]), np.array([0.0, 1.0])) == 0

    def test_ucb_matches_oracle_on_fresh_table(self, toy):
        table = SurrogateTable.initialize(toy, 5.0)
        tilde = surrogate_expected_improvement(table, ALPHA, toy.L)
        radii = error_radius(table, 5.0, ALPHA, toy.L, toy.smoothness_constants)
        assert select_ucb(tilde, radii) == select_oracle(
            expected_improvement(toy, 5.0, ALPHA)
        )

    @given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=12),
           st.floats(-1e6, 1e6))
    @settings(max_examples=200, deadline=None)
    def test_argmax_invariant_to_common_shift(self, values, shift):
        ei = np.asarray(values)
        shifted = ei + shift
        # adding a large shift can round distinct values together; the
        # invariance claim only applies when no such tie is created
        assume(len(np.unique(shifted)) == len(np.unique(ei)))
        assert select_oracle(ei) == select_oracle(shifted)

    @given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=12))
    @settings(max_examples=200, deadline=None)
    def test_chosen_ei_at_least_mean(self, values):
        ei = np.asarray(values)
        assert ei[select_oracle(ei)] >= ei.mean() - 1e-9
