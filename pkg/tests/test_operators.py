import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mhdlab import Field, Grid, ddx, ddy, inv_dy


def make_field(grid, fn):
    return Field.from_function(grid, fn)


class TestDdx:
    def test_analytic_derivative(self, grid):
        f = make_field(grid, lambda x, y: np.sin(x) * np.exp(-y))
        expect = make_field(grid, lambda x, y: np.cos(x) * np.exp(-y))
        err = np.max(np.abs(ddx(f).values - expect.values))
        assert err < 2.0 * grid.dx**4  # |k^5/30| = 1/30 for k=1

    def test_constant_is_exact_zero(self, grid):
        f = make_field(grid, lambda x, y: 0.0 * x + 3.5)  # binary-exact value
        assert np.all(ddx(f).values == 0.0)
        assert np.all(ddx(f, 2).values == 0.0)
        g = make_field(grid, lambda x, y: 0.0 * x + 3.7)
        assert np.max(np.abs(ddx(g).values)) < 1e-14  # roundoff only

    def test_sin3x_error_bound(self):
        # 4th-order FD error for k=3, n_x=64 is k^5 dx^4/30 = 7.5e-4; the
        # scheme cannot do better (see decisions ledger re the 1e-5 figure)
        g = Grid(64, 17, 8.0)
        f = make_field(g, lambda x, y: np.sin(3 * x) + 0 * y)
        err = np.max(np.abs(ddx(f).values - 3 * np.cos(3 * g.x)[:, None]))
        assert err < 1e-3

    def test_fourth_order_convergence(self):
        errs = []
        for n_x in (16, 32):
            g = Grid(n_x, 17, 8.0)
            f = make_field(g, lambda x, y: np.sin(2 * x) + 0 * y)
            errs.append(np.max(np.abs(ddx(f).values - 2 * np.cos(2 * g.x)[:, None])))
        order = np.log2(errs[0] / errs[1])
        assert 3.5 < order < 4.5

    def test_second_derivative_consistency(self, fine_grid):
        f = make_field(fine_grid, lambda x, y: np.sin(2 * x) * np.exp(-y))
        twice = ddx(ddx(f, 1), 1).values
        once = ddx(f, 2).values
        assert np.max(np.abs(twice - once)) < 10.0 * fine_grid.dx**2

    def test_invalid_order(self, grid):
        with pytest.raises(ValueError):
            ddx(make_field(grid, lambda x, y: x * 0), 3)


class TestDdy:
    def test_exponential_profile(self, fine_grid):
        f = make_field(fine_grid, lambda x, y: np.exp(-y) + 0 * x)
        err = np.abs(ddy(f).values + np.exp(-fine_grid.y)[None, :])
        assert np.max(err[:, 1:-1]) < fine_grid.dy**2

    def test_linear_exact(self, grid):
        f = make_field(grid, lambda x, y: 2.5 * y + 0 * x)
        assert np.allclose(ddy(f).values, 2.5, atol=1e-12)

    def test_quadratic_second_derivative_exact(self, grid):
        # one-sided closure (2f0 - 5f1 + 4f2 - f3)/dy^2 reproduces f'' = 2
        # exactly on y^2: coefficients sum pattern 0 - 5 + 16 - 9 = 2
        f = make_field(grid, lambda x, y: y**2 + 0 * x)
        assert np.allclose(ddy(f, 2).values, 2.0, atol=1e-9)

    def test_needs_five_nodes(self):
        g = Grid(8, 16, 4.0)
        f = make_field(g, lambda x, y: y + 0 * x)
        assert ddy(f).values.shape == (8, 16)

    def test_invalid_order(self, grid):
        with pytest.raises(ValueError):
            ddy(make_field(grid, lambda x, y: x * 0), 0)


class TestInvDy:
    def test_constant(self, grid):
        f = make_field(grid, lambda x, y: 0 * x + 2.0)
        assert np.allclose(inv_dy(f).values, 2.0 * grid.y[None, :], atol=1e-12)

    def test_exponential(self, fine_grid):
        f = make_field(fine_grid, lambda x, y: np.exp(-y) + 0 * x)
        expect = 1.0 - np.exp(-fine_grid.y)
        err = np.max(np.abs(inv_dy(f).values - expect[None, :]))
        assert err < fine_grid.dy**2

    def test_round_trip_ddy(self, fine_grid):
        f = make_field(fine_grid, lambda x, y: np.sin(y) * np.exp(-y) + 0 * x)
        back = ddy(inv_dy(f)).values
        err = np.abs(back - f.values)
        assert np.max(err[:, 1:-1]) < fine_grid.dy**2

    def test_zero_at_wall_for_any_input(self, grid, rng):
        f = Field(grid, rng.standard_normal((grid.n_x, grid.n_y)))
        assert np.all(inv_dy(f).values[:, 0] == 0.0)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**31 - 1))
def test_ddx_commutes_with_inv_dy(seed):
    # disjoint axes: exact up to floating-point roundoff
    grid = Grid(16, 33, 8.0)
    values = np.random.default_rng(seed).standard_normal((16, 33))
    f = Field(grid, values)
    a = ddx(inv_dy(f)).values
    b = inv_dy(ddx(f)).values
    assert np.max(np.abs(a - b)) <= 1e-12 * max(1.0, np.max(np.abs(values)))


def test_operators_keep_fields_finite(grid, rng):
    f = Field(grid, rng.standard_normal((grid.n_x, grid.n_y)))
    for out in (ddx(f), ddx(f, 2), ddy(f), ddy(f, 2), inv_dy(f)):
        assert out.is_finite()


def test_raw_array_interface(grid):
    vals = np.outer(np.sin(grid.x), np.exp(-grid.y))
    assert np.allclose(ddx(vals, 1, grid), ddx(Field(grid, vals)).values)
    with pytest.raises(ValueError):
        ddx(vals)  # raw arrays need an explicit grid
