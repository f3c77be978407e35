import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from caputonet.caputo import Grid, apply, apply_transpose, build_weights


def caputo_of_t(alpha, t):
    """Closed form D^alpha t = t^(1-alpha) / Gamma(2-alpha)."""
    return t ** (1 - alpha) / math.gamma(2 - alpha)


def caputo_of_t2(alpha, t):
    """Closed form D^alpha t^2 = 2 t^(2-alpha) / Gamma(3-alpha)."""
    return 2 * t ** (2 - alpha) / math.gamma(3 - alpha)


def observed_order(alpha, n_base=11, levels=4, t_end=1.0):
    hs, errs = [], []
    for level in range(levels):
        grid = Grid(t_end, (n_base - 1) * 2**level + 1)
        t = grid.nodes
        d = apply(build_weights(alpha, grid), t**2)
        hs.append(grid.h)
        errs.append(np.max(np.abs(d[1:] - caputo_of_t2(alpha, t[1:]))))
    slope, _ = np.polyfit(np.log(hs), np.log(errs), 1)
    return slope


class TestGrid:
    def test_nodes(self):
        g = Grid(2.0, 5)
        assert g.h == 0.5
        np.testing.assert_array_equal(g.nodes, [0.0, 0.5, 1.0, 1.5, 2.0])

    @pytest.mark.parametrize("t_end, n", [(1.0, 101), (2.0, 2001), (0.3, 7)])
    def test_uniform_and_endpoints(self, t_end, n):
        g = Grid(t_end, n)
        t = g.nodes
        assert t[0] == 0.0 and t[-1] == t_end
        assert np.all(np.diff(t) > 0)
        np.testing.assert_allclose(np.diff(t), g.h, atol=1e-12 * t_end, rtol=0)

    @pytest.mark.parametrize("t_end, n", [(0.0, 5), (-1.0, 5), (1.0, 1), (1.0, 2.5), (math.inf, 3)])
    def test_invalid(self, t_end, n):
        with pytest.raises(ValueError):
            Grid(t_end, n)

    def test_refined(self):
        assert Grid(2.0, 101).refined(2) == Grid(2.0, 201)


class TestWeights:
    def test_alpha_one_limit(self):
        w = build_weights(1.0, Grid(1.0, 8))
        for n in range(1, 8):
            row = w.delta_row(n)
            assert row[-1] == 1.0
            assert np.all(row[:-1] == 0.0)
        assert w.scale == pytest.approx(7.0)

    def test_closed_form_entry(self):
        w = build_weights(0.5, Grid(1.0, 6))
        assert w.delta[2, 0] == pytest.approx(math.sqrt(2) - 1, abs=1e-15)
        assert w.delta[2, 0] == pytest.approx(0.41421356, abs=1e-8)

    @pytest.mark.parametrize("alpha", [0.1, 0.5, 0.9, 1.0])
    def test_telescoping(self, alpha):
        w = build_weights(alpha, Grid(1.0, 40))
        for n in range(1, 40):
            assert w.delta_row(n).sum() == pytest.approx(n ** (1 - alpha), rel=1e-13)

    @pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8, 0.99])
    def test_positive_increasing_and_unit_diagonal(self, alpha):
        w = build_weights(alpha, Grid(1.0, 30))
        for n in range(1, 30):
            row = w.delta_row(n)
            assert np.all(row > 0)
            assert row[-1] == 1.0
            assert np.all(np.diff(row) > 0)

    def test_scale(self):
        g = Grid(2.0, 21)
        w = build_weights(0.7, g)
        assert w.scale == pytest.approx(1 / (g.h**0.7 * math.gamma(1.3)), rel=1e-14)

    @pytest.mark.parametrize("alpha", [0.0, -0.2, 1.01, math.nan])
    def test_bad_alpha(self, alpha):
        with pytest.raises(ValueError):
            build_weights(alpha, Grid(1.0, 5))

    def test_immutable(self):
        w = build_weights(0.5, Grid(1.0, 5))
        with pytest.raises(ValueError):
            w.delta[1, 0] = 3.0


class TestApply:
    def test_constant(self):
        w = build_weights(0.6, Grid(1.0, 25))
        np.testing.assert_array_equal(apply(w, np.full(25, 3.7)), 0.0)

    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7, 0.9, 1.0])
    @pytest.mark.parametrize("n", [10, 11, 100, 101])
    def test_exact_on_linear(self, alpha, n):
        g = Grid(1.0, n)
        t = g.nodes
        c = -2.5
        d = apply(build_weights(alpha, g), c * t)
        np.testing.assert_allclose(d[1:], c * caputo_of_t(alpha, t[1:]), rtol=1e-10)

    def test_first_entry_is_zero(self):
        g = Grid(1.0, 9)
        assert apply(build_weights(0.4, g), g.nodes**2)[0] == 0.0

    def test_alpha_one_is_backward_difference(self):
        rng = np.random.default_rng(0)
        for n in (5, 50, 500):
            g = Grid(1.7, n)
            x = rng.standard_normal(n)
            d = apply(build_weights(1.0, g), x)
            np.testing.assert_allclose(d[1:], np.diff(x) / g.h, rtol=1e-13, atol=0)

    @pytest.mark.parametrize("alpha", [0.5, 0.7, 0.9])
    def test_convergence_order_on_t_squared(self, alpha):
        assert observed_order(alpha) == pytest.approx(2 - alpha, abs=0.2)

    def test_t_squared_converges(self):
        errs = []
        for n in (11, 21, 41, 81):
            g = Grid(1.0, n)
            d = apply(build_weights(0.5, g), g.nodes**2)
            errs.append(abs(d[-1] - caputo_of_t2(0.5, 1.0)))
        assert all(b < a for a, b in zip(errs, errs[1:]))

    def test_length_mismatch(self):
        w = build_weights(0.5, Grid(1.0, 5))
        with pytest.raises(ValueError, match="expected 5"):
            apply(w, np.zeros(4))
        with pytest.raises(ValueError):
            apply_transpose(w, np.zeros(6))

    def test_transpose_is_adjoint(self):
        rng = np.random.default_rng(3)
        w = build_weights(0.65, Grid(1.0, 33))
        x, c = rng.standard_normal(33), rng.standard_normal(33)
        assert c @ apply(w, x) == pytest.approx(apply_transpose(w, c) @ x, rel=1e-12)

    def test_matrix_matches_apply(self):
        rng = np.random.default_rng(4)
        w = build_weights(0.35, Grid(1.0, 20))
        x = rng.standard_normal(20)
        np.testing.assert_allclose(w.matrix @ x, apply(w, x), rtol=1e-12, atol=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(
        alpha=st.floats(0.05, 1.0),
        a=st.floats(-10, 10),
        b=st.floats(-10, 10),
        seed=st.integers(0, 2**32 - 1),
    )
    def test_linearity(self, alpha, a, b, seed):
        rng = np.random.default_rng(seed)
        w = build_weights(alpha, Grid(1.0, 30))
        x, y = rng.standard_normal(30), rng.standard_normal(30)
        lhs = apply(w, a * x + b * y)
        rhs = a * apply(w, x) + b * apply(w, y)
        scale = 1.0 + np.max(np.abs(w.scale * (abs(a) + abs(b))))
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * scale)
