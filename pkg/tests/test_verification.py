import math

import numpy as np
import pytest

from mhdlab import CutoffPhi, Grid, SolverConfig, make_flow
from mhdlab.presets import make_initial_state
from mhdlab.verification import (
    TestFunctionFamily,
    check_hardy,
    check_product_estimate,
    check_trace_inequality,
    difference_transform,
    epsilon_study,
    mms_steady_floor,
    psi_reconstruction_residual,
    trace_saturation_ratio,
    uniqueness_contraction,
)


class TestFamily:
    def test_derivatives_match_sympy_oracle(self):
        import sympy as sp

        fam = TestFunctionFamily(seed=5)
        fn = fam.sample()
        x_s, y_s = sp.symbols("x y")
        c = fn.ycoeffs
        expr = (
            fn.amp
            * sp.cos(fn.k * x_s + fn.phase)
            * (c[0] + c[1] * y_s + c[2] * y_s**2)
            * sp.exp(-fn.a * y_s)
        )
        pts = [(0.3, 0.0), (1.1, 2.7), (4.0, 9.3)]
        for b2 in range(3):
            for k_y in range(3):
                d = sp.lambdify((x_s, y_s), sp.diff(expr, x_s, b2, y_s, k_y))
                for xv, yv in pts:
                    mine = fn.eval(np.array([[xv]]), np.array([[yv]]), b2, k_y)
                    assert abs(mine[0, 0] - d(xv, yv)) < 1e-10 * max(
                        1.0, abs(d(xv, yv))
                    )

    def test_decay_floor_enforced(self):
        with pytest.raises(ValueError):
            TestFunctionFamily(seed=0, decay_range=(0.1, 0.5))

    def test_seeded_reproducibility(self):
        a = TestFunctionFamily(seed=9).sample()
        b = TestFunctionFamily(seed=9).sample()
        assert a == b


class TestTraceChecks:
    def test_saturating_case_parametric(self):
        # f = a(x) e^{-y} saturates the interpolation bound for any a(x)
        for amp, k, phase in [(1.0, 1, 0.0), (0.5, 2, 1.1), (2.0, 0, 0.3)]:
            ratio = trace_saturation_ratio(amp, k, phase)
            assert abs(ratio - 1.0) < 1e-3

    def test_zero_function_trivial(self):
        grid = Grid(16, 65, 8.0)
        X, Y = grid.meshgrid()
        from mhdlab.verification import TestFn

        f = TestFn(amp=0.0, k=1, phase=0.0, ycoeffs=(1.0,), a=1.0)
        assert np.max(np.abs(f.eval(X, Y))) == 0.0

    def test_suite_passes(self):
        fam = TestFunctionFamily(seed=13)
        for rep in check_trace_inequality(fam, 25):
            assert rep.passed, rep.name


class TestHardy:
    def test_frozen_oracle_lambda1(self):
        # f = e^{-y}: on [0, 30] the quadrature oracle gives
        # LHS = ||(1-e^{-y})/(1+y)|| = 0.6616490 (0.685593 on the half-line;
        # the (1+y)^{-2} tail carries the difference); RHS = 2||e^{-y}||
        y = np.linspace(0.0, 30.0, 20001)
        dy = y[1] - y[0]
        w = np.full_like(y, dy)
        w[0] = w[-1] = dy / 2
        f = np.exp(-y)
        anti = np.concatenate(([0.0], np.cumsum(0.5 * dy * (f[1:] + f[:-1]))))
        lhs = math.sqrt(float(np.sum(w * (anti / (1 + y)) ** 2)))
        rhs = 2.0 * math.sqrt(float(np.sum(w * f**2)))
        assert abs(lhs - 0.6616490) < 1e-4
        assert abs(rhs - math.sqrt(2.0)) < 1e-4
        assert lhs < rhs

    def test_suite_passes(self):
        fam = TestFunctionFamily(seed=17)
        for rep in check_hardy(fam, 25):
            assert rep.passed, rep.name


class TestProductEstimate:
    def test_fit_is_stable(self):
        fam = TestFunctionFamily(seed=23)
        (rep,) = check_product_estimate(fam, 16)
        assert rep.passed

    def test_ratio_scale_invariant(self):
        # doubling f doubles LHS and RHS alike
        grid = Grid(16, 101, 20.0)
        X, Y = grid.meshgrid()
        from mhdlab.norms import weighted_l2_sq
        from mhdlab.grid import Field
        from mhdlab.verification import TestFn

        f = TestFn(amp=1.0, k=1, phase=0.0, ycoeffs=(1.0, 0.5), a=0.8)
        f2 = TestFn(amp=2.0, k=1, phase=0.0, ycoeffs=(1.0, 0.5), a=0.8)
        lhs1 = math.sqrt(weighted_l2_sq(Field(grid, f.eval(X, Y) ** 2), 0.0))
        lhs2 = math.sqrt(weighted_l2_sq(Field(grid, (f2.eval(X, Y)) * f.eval(X, Y)), 0.0))
        n1 = f.sobolev_norm(grid, 3, 0.0)
        n2 = f2.sobolev_norm(grid, 3, 0.0)
        assert abs(lhs2 / lhs1 - 2.0) < 1e-12
        assert abs(n2 / n1 - 2.0) < 1e-12


class TestMMS:
    def test_steady_state_error_floor(self):
        half, final = mms_steady_floor(t_end=0.1)
        # t-independent floor: error does not grow between t/2 and t
        assert final < 2.0 * half
        assert final < 1e-2


class TestEpsilonStudy:
    def test_x_independent_data_eps_invariant(self, phi):
        # dxx and the correctors vanish on x-independent data: all eps agree
        g = Grid(8, 65, 8.0)
        cfg = SolverConfig(dt=2e-3, t_end=0.02, monitor_every=5)
        flow = make_flow("constants", h0=0.5)
        s0 = make_initial_state("shear", g, phi, cfg)
        study = epsilon_study(s0, flow, phi, cfg, [1e-2, 5e-3, 2.5e-3])
        assert max(study.differences) < 1e-13

    def test_requires_three_descending(self, phi, floor_state, floor_flow, cfg):
        with pytest.raises(ValueError):
            epsilon_study(floor_state, floor_flow, phi, cfg, [1e-2, 5e-3])
        with pytest.raises(ValueError):
            epsilon_study(floor_state, floor_flow, phi, cfg, [1e-3, 5e-3, 1e-2])


class TestUniqueness:
    def setup_problem(self, perturb):
        phi = CutoffPhi(1.0)
        g = Grid(16, 129, 8.0)
        cfg = SolverConfig(dt=2e-3, t_end=0.1, monitor_every=10, delta0=0.1)
        flow = make_flow("constants", h0=0.5)
        a = make_initial_state("floor", g, phi, cfg)
        b = make_initial_state("perturbed_floor", g, phi, cfg, perturb=perturb)
        return a, b, flow, phi, cfg

    def test_difference_boundary_conditions(self):
        a, b, flow, phi, cfg = self.setup_problem(1e-3)
        d = difference_transform(a, b, flow, phi, cfg, 0.0)
        bu, bt, bh = d.boundary_residuals()
        assert bu < 1e-14 and bt < 1e-14
        assert bh < 1e-3 * 10  # O(dy^2) of the perturbation scale

    def test_swap_roles_both_contract(self):
        a, b, flow, phi, cfg = self.setup_problem(1e-6)
        rep = uniqueness_contraction(a, b, flow, phi, cfg)
        assert math.isfinite(rep.rate) and math.isfinite(rep.swap_rate)
        bound = rep.initial_energy * math.exp(
            max(rep.rate, rep.swap_rate, 0.0) * cfg.t_end
        )
        assert rep.sup_energy <= 2.0 * bound

    def test_psi_reconstruction_accuracy(self):
        # perturbation small enough to keep solution b inside the floor
        a, b, flow, phi, cfg = self.setup_problem(0.05)
        d = difference_transform(a, b, flow, phi, cfg, 0.0)
        res = psi_reconstruction_residual(d, b, flow, phi, 0.0)
        scale = np.max(np.abs(d.psi_tilde.values))
        assert scale > 0.0
        assert res < 5.0 * a.grid.dy**2 * scale
