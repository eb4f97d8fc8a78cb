import numpy as np
import pytest

from mhdlab import (
    Field,
    Grid,
    HomogeneousState,
    PhysicalState,
    SolverConfig,
    ddx,
    ddy,
    from_homogeneous,
    make_flow,
    reconstruct_vg,
    source_terms,
    to_homogeneous,
)
from mhdlab.norms import weighted_l2_norm


def random_physical(grid, rng):
    def rf():
        return Field(grid, rng.standard_normal((grid.n_x, grid.n_y)))

    return PhysicalState(u1=rf(), u2=rf(), theta_phys=rf(), h1=rf(), h2=rf())


class TestTransform:
    def test_zero_flow_is_identity(self, grid, phi, rng):
        p = random_physical(grid, rng)
        s = to_homogeneous(p, make_flow("zero"), phi, 0.3)
        assert np.array_equal(s.u.values, p.u1.values)
        assert np.array_equal(s.theta.values, p.theta_phys.values)
        assert np.array_equal(s.h.values, p.h1.values)

    def test_outer_profile_maps_to_zero(self, grid, phi):
        flow = make_flow("uh_pair", amp=0.7, k=1, theta0=0.4)
        t = 0.2
        p1 = phi.profile(grid.y, 1)
        p0 = phi.profile(grid.y, 0)
        x = grid.x
        p = PhysicalState(
            u1=Field(grid, flow.U(t, x)[:, None] * p1),
            u2=Field(grid, -flow.U(t, x, 0, 1)[:, None] * p0),
            theta_phys=Field(grid, flow.Theta(t, x)[:, None] * p1),
            h1=Field(grid, flow.H(t, x)[:, None] * p1),
            h2=Field(grid, -flow.H(t, x, 0, 1)[:, None] * p0),
        )
        s = to_homogeneous(p, flow, phi, t)
        for f in (*s.fields(), *s.vg):
            assert np.max(np.abs(f.values)) < 1e-14

    def test_round_trip(self, grid, phi, rng):
        flow = make_flow("random", seed=11)
        p = random_physical(grid, rng)
        t = 0.7
        back = from_homogeneous(to_homogeneous(p, flow, phi, t), flow, phi, t)
        for a, b in (
            (back.u1, p.u1),
            (back.u2, p.u2),
            (back.theta_phys, p.theta_phys),
            (back.h1, p.h1),
            (back.h2, p.h2),
        ):
            assert np.max(np.abs(a.values - b.values)) < 1e-12

    def test_zero_state_gives_outer_profile(self, grid, phi):
        flow = make_flow("constants", u0=0.8, theta0=0.5, h0=0.3)
        p = from_homogeneous(HomogeneousState.zeros(grid), flow, phi, 0.0)
        p1 = phi.profile(grid.y, 1)
        assert np.allclose(p.u1.values, 0.8 * p1, atol=1e-14)
        # aloft phi' = 1: tangential values approach the traces
        assert abs(p.u1.values[0, -1] - 0.8) < 1e-14
        assert abs(p.theta_phys.values[0, -1] - 0.5) < 1e-14
        assert abs(p.h1.values[0, -1] - 0.3) < 1e-14

    def test_boundary_residuals_of_mapped_state(self, fine_grid, phi, cfg):
        from mhdlab.presets import make_initial_state

        flow = make_flow("constants", h0=0.5)
        s = make_initial_state("floor", fine_grid, phi, cfg)
        p = from_homogeneous(s, flow, phi, 0.0)
        res = p.boundary_residuals()
        assert res["u1"] < 1e-14
        assert res["u2"] < 1e-14
        assert res["theta"] < 1e-14
        assert res["h2"] < 1e-14
        # analytic dy h1(0) = 0; the one-sided stencil leaves O(dy^2) of it
        assert res["dy_h1"] < 5.0 * fine_grid.dy**2


class TestReconstructVG:
    def test_x_independent_gives_zero_v(self, grid):
        u = Field.from_function(grid, lambda x, y: 0 * x + np.exp(-y))
        v, _ = reconstruct_vg(u, Field.zeros(grid))
        assert np.max(np.abs(v.values)) < 1e-14

    def test_analytic_example(self, fine_grid):
        u = Field.from_function(fine_grid, lambda x, y: np.sin(x) * np.exp(-y))
        v, _ = reconstruct_vg(u, Field.zeros(fine_grid))
        expect = Field.from_function(
            fine_grid, lambda x, y: -np.cos(x) * (1.0 - np.exp(-y))
        )
        err = np.max(np.abs(v.values - expect.values))
        assert err < 2.0 * (fine_grid.dy**2 + fine_grid.dx**4)

    def test_discrete_divergence(self, fine_grid, rng):
        u = Field.from_function(
            fine_grid, lambda x, y: np.sin(2 * x) * y * np.exp(-y)
        )
        h = Field.from_function(fine_grid, lambda x, y: np.cos(x) * np.exp(-y))
        v, g = reconstruct_vg(u, h)
        div_u = ddx(u).values + ddy(v).values
        div_h = ddx(h).values + ddy(g).values
        # bounded by the ddy(inv_dy) commutation error, O(dy^2)
        tol = 5.0 * fine_grid.dy**2
        assert np.max(np.abs(div_u)) < tol
        assert np.max(np.abs(div_h)) < tol

    def test_vanish_at_wall(self, grid, rng):
        u = Field(grid, rng.standard_normal((grid.n_x, grid.n_y)))
        h = Field(grid, rng.standard_normal((grid.n_x, grid.n_y)))
        v, g = reconstruct_vg(u, h)
        assert np.all(v.values[:, 0] == 0.0)
        assert np.all(g.values[:, 0] == 0.0)


class TestSourceTerms:
    cfg = SolverConfig()

    def r(self, grid, flow, phi, t=0.3):
        return source_terms(grid, flow, phi, self.cfg, t)

    def test_support_above_band(self, fine_grid, phi):
        for seed in range(4):
            flow = make_flow("random", seed=seed)
            r1, r2, r3, r4 = self.r(fine_grid, flow, phi)
            aloft = fine_grid.y >= 2.0 * phi.r0
            for ri in (r1, r2, r3, r4):
                assert np.max(np.abs(ri.values[:, aloft])) == 0.0

    def test_wall_band_values(self, fine_grid, phi):
        flow = make_flow("random", seed=9)
        t = 0.45
        r1, r2, r3, r4 = self.r(fine_grid, flow, phi, t)
        wall = fine_grid.y <= phi.r0
        p_x = flow.P(t, fine_grid.x, 0, 1)[:, None]
        assert np.max(np.abs(r1.values[:, wall] + p_x * np.ones_like(r1.values)[:, wall])) == 0.0
        assert np.max(np.abs(r2.values[:, wall])) == 0.0
        assert np.max(np.abs(r3.values[:, wall])) == 0.0
        assert np.max(np.abs(r4.values[:, wall])) == 0.0

    def test_zero_flow(self, grid, phi):
        for ri in self.r(grid, make_flow("zero"), phi):
            assert np.max(np.abs(ri.values)) == 0.0

    def test_scaling_u_only(self, grid, phi):
        f1 = make_flow("single_mode", amp=0.5, k=1)
        f2 = make_flow("single_mode", amp=1.0, k=1)
        r1a, r2a, r3a, r4a = self.r(grid, f1, phi)
        r1b, r2b, r3b, r4b = self.r(grid, f2, phi)
        # r1's U-terms are linear, r2's U-term is the quadratic mu*(U phi'')^2
        assert np.allclose(r1b.values, 2.0 * r1a.values, atol=1e-14)
        assert np.allclose(r2b.values, 4.0 * r2a.values, atol=1e-14)
        assert np.max(np.abs(r3a.values)) == 0.0
        assert np.max(np.abs(r4a.values)) == 0.0

    def test_scaling_h_only(self, grid, phi):
        f1 = make_flow("decaying_h", h0=0.4, rate=-1.0)
        f2 = make_flow("decaying_h", h0=0.8, rate=-1.0)
        r1a, r2a, r3a, r4a = self.r(grid, f1, phi)
        r1b, r2b, r3b, r4b = self.r(grid, f2, phi)
        assert np.max(np.abs(r1a.values)) == 0.0
        assert np.allclose(r2b.values, 4.0 * r2a.values, atol=1e-14)
        assert np.allclose(r3b.values, 2.0 * r3a.values, atol=1e-14)
        assert np.allclose(r4b.values, 2.0 * r4a.values, atol=1e-14)

    def test_theta_scaling_quadratic_model(self, grid, phi):
        # r2 in a Theta-only flow mixes linear terms with kappa*(Theta phi'')^2;
        # evaluating at c = 1, 2 must predict c = 3 exactly if and only if the
        # transcription is a polynomial of degree 2 in the trace amplitude
        def theta_flow(c):
            from mhdlab.outer_flow import OuterFlow, TraceFunction, TraceTerm

            th = TraceFunction([TraceTerm(amp=c, k=1, tpoly=(1.0, 0.5, 0.0)),
                                TraceTerm(amp=2 * c)])
            zero = TraceFunction()
            return OuterFlow(zero, th, zero, zero)

        r2 = [self.r(grid, theta_flow(c), phi)[1].values for c in (1.0, 2.0, 3.0)]
        lin = 2.0 * r2[0] - 0.5 * (r2[1] - 2.0 * r2[0]) * 2.0
        quad = 0.5 * (r2[1] - 2.0 * r2[0])
        predicted = 3.0 * (r2[0] - quad) + 9.0 * quad
        assert np.allclose(r2[2], predicted, atol=1e-12)

    def test_weighted_norms_finite(self, grid, phi):
        flow = make_flow("random", seed=21)
        for ri in self.r(grid, flow, phi):
            assert np.isfinite(weighted_l2_norm(ri, 2.0))


def test_state_divergence_by_construction(fine_grid, rng):
    u = Field.from_function(fine_grid, lambda x, y: np.sin(x) * y**2 * np.exp(-y))
    h = Field.from_function(fine_grid, lambda x, y: np.cos(x) * np.exp(-y))
    s = HomogeneousState(u, Field.zeros(fine_grid), h)
    assert s.v is s.vg[0] and s.g is s.vg[1]  # cached, not recomputed
