"""Verification suites: inequality checks, MMS studies, eps-convergence,
and the uniqueness-contraction experiment.

All inequality checks are one-sided - LHS <= RHS * (1 + slack) with
slack = 1e-3 plus a tail estimate - over randomized decaying samples with
fully analytic derivatives. A violation reports the witness sample and seed.
Constants the theory leaves generic (product estimates) are fitted on a
calibration set and pinned by a held-out stability assertion instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .config import SolverConfig
from .diagnostics import stream_function
from .grid import Field, Grid
from .homogenize import HomogeneousState
from .mms import build_manufactured
from .norms import WeightedNormSpec, weighted_l2_sq
from .operators import ddx, ddy, inv_dy
from .outer_flow import CutoffPhi, OuterFlow, make_flow
from .presets import make_initial_state
from .solver import run, step

BASE_SLACK = 1e-3


# ---------------------------------------------------------------------------
# randomized decaying test functions with analytic derivatives


@dataclass(frozen=True)
class TestFn:
    """amp * cos(k x + phase) * (c0 + c1 y + c2 y^2) * exp(-a y)."""

    __test__ = False  # not a pytest class

    amp: float
    k: int
    phase: float
    ycoeffs: tuple
    a: float

    def _ypoly(self, k_y: int):
        # d/dy acts on P(y) e^{-a y} as (P' - a P) e^{-a y}
        c = list(self.ycoeffs)
        for _ in range(k_y):
            dp = [c[i] * i for i in range(1, len(c))] + [0.0]
            c = [dp[i] - self.a * c[i] for i in range(len(c))]
        return c

    def eval(self, X, Y, b2: int = 0, k_y: int = 0):
        xman = self.amp * self.k**b2 * np.cos(
            self.k * X + self.phase + b2 * np.pi / 2.0
        )
        if self.k == 0:
            xman = self.amp * (np.ones_like(X) if b2 == 0 else np.zeros_like(X))
        c = self._ypoly(k_y)
        poly = sum(cc * Y**i for i, cc in enumerate(c))
        return xman * poly * np.exp(-self.a * Y)

    def sobolev_norm(self, grid: Grid, m: int, l: float) -> float:
        """H^m_l norm from analytic derivatives (spatial multi-indices)."""
        X, Y = grid.meshgrid()
        total = 0.0
        for b2 in range(m + 1):
            for k_y in range(m - b2 + 1):
                f = Field(grid, self.eval(X, Y, b2, k_y))
                total += weighted_l2_sq(f, l + k_y)
        return float(np.sqrt(total))


@dataclass
class TestFunctionFamily:
    """Seeded generator of decaying samples (decay rate >= 1/4)."""

    __test__ = False  # not a pytest class

    seed: int = 0
    amp_range: tuple = (0.3, 1.5)
    wavenumbers: tuple = (0, 1, 2, 3)
    decay_range: tuple = (0.3, 1.2)
    poly_degree: int = 2
    _rng: np.random.Generator = field(default=None, repr=False)

    def __post_init__(self):
        if self.decay_range[0] < 0.25:
            raise ValueError("family must decay at least like exp(-y/4)")
        self._rng = np.random.default_rng(self.seed)

    def sample(self) -> TestFn:
        rng = self._rng
        c0 = rng.uniform(0.2, 1.0) * rng.choice([-1.0, 1.0])
        coeffs = [c0] + [
            rng.uniform(-1.0, 1.0) for _ in range(self.poly_degree)
        ]
        return TestFn(
            amp=float(rng.uniform(*self.amp_range)),
            k=int(rng.choice(self.wavenumbers)),
            phase=float(rng.uniform(0.0, 2.0 * np.pi)),
            ycoeffs=tuple(coeffs),
            a=float(rng.uniform(*self.decay_range)),
        )


def _verification_grid() -> Grid:
    # y_max = 20 keeps the slowest family tails (a = 1/4) below the slack
    return Grid(n_x=32, n_y=401, y_max=20.0)


def _tail_slack(fn: TestFn, grid: Grid) -> float:
    # exp(-2 a y_max) relative tail of the squared integrand, conservatively
    return math.exp(-2.0 * fn.a * grid.y_max) / max(2.0 * fn.a, 0.5)


@dataclass
class CheckReport:
    name: str
    n_samples: int
    worst_ratio: float
    threshold: float
    passed: bool
    witness: str = ""
    seed: int = 0

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "n_samples": self.n_samples,
            "worst_ratio": self.worst_ratio,
            "threshold": self.threshold,
            "pass": self.passed,
            "detail": f"worst ratio {self.worst_ratio:.6f} vs {self.threshold:.6f}"
            + (f" (witness {self.witness})" if self.witness else ""),
            "seed": self.seed,
        }


def _l2(grid, arr, l=0.0):
    return float(np.sqrt(weighted_l2_sq(Field(grid, arr), l)))


def check_trace_inequality(family: TestFunctionFamily, n_samples: int) -> list:
    """Wall product bound and wall trace interpolation bound."""
    grid = _verification_grid()
    X, Y = grid.meshgrid()
    dx = grid.dx
    worst1 = worst2 = 0.0
    wit1 = wit2 = ""
    for _ in range(n_samples):
        f, g = family.sample(), family.sample()
        fv, gv = f.eval(X, Y), g.eval(X, Y)
        fy, gy = f.eval(X, Y, 0, 1), g.eval(X, Y, 0, 1)
        slack = BASE_SLACK + _tail_slack(f, grid) + _tail_slack(g, grid)

        lhs1 = abs(dx * float(np.sum(fv[:, 0] * gv[:, 0])))
        rhs1 = _l2(grid, fy) * _l2(grid, gv) + _l2(grid, fv) * _l2(grid, gy)
        r1 = lhs1 / (rhs1 * (1.0 + slack)) if rhs1 > 0 else 0.0
        if r1 > worst1:
            worst1, wit1 = r1, repr((f, g))

        lhs2 = float(np.sqrt(dx * np.sum(fv[:, 0] ** 2)))
        rhs2 = math.sqrt(2.0) * math.sqrt(_l2(grid, fv) * _l2(grid, fy))
        r2 = lhs2 / (rhs2 * (1.0 + slack)) if rhs2 > 0 else 0.0
        if r2 > worst2:
            worst2, wit2 = r2, repr(f)
    return [
        CheckReport("wall_product_bound", n_samples, worst1, 1.0, worst1 <= 1.0, wit1, family.seed),
        CheckReport("wall_trace_interpolation", n_samples, worst2, 1.0, worst2 <= 1.0, wit2, family.seed),
    ]


def trace_saturation_ratio(amp: float = 1.0, k: int = 1, phase: float = 0.0) -> float:
    """Equality case of the trace interpolation: f = a(x) e^{-y} gives ratio 1."""
    grid = _verification_grid()
    X, Y = grid.meshgrid()
    f = TestFn(amp=amp, k=k, phase=phase, ycoeffs=(1.0,), a=1.0)
    fv = f.eval(X, Y)
    fy = f.eval(X, Y, 0, 1)
    lhs = float(np.sqrt(grid.dx * np.sum(fv[:, 0] ** 2)))
    rhs = math.sqrt(2.0) * math.sqrt(_l2(grid, fv) * _l2(grid, fy))
    return lhs / rhs


def check_hardy(family: TestFunctionFamily, n_samples: int, lambdas=(0.6, 1.0, 2.0)) -> list:
    """Weighted Hardy bounds (L2 family and unit case) plus the sup-norm version."""
    n = 4001
    y = np.linspace(0.0, 30.0, n)
    dy = y[1] - y[0]
    wq = np.full(n, dy)
    wq[0] = wq[-1] = dy / 2.0

    def l2y(vals):
        return float(np.sqrt(np.sum(wq * vals**2)))

    out = []
    for lam in lambdas:
        worst = 0.0
        wit = ""
        for _ in range(n_samples):
            f = family.sample()
            prof = f.eval(np.zeros(1), y[None, :], 0, 0)[0] / max(f.amp, 1e-12)
            anti = np.concatenate(
                ([0.0], np.cumsum(0.5 * dy * (prof[1:] + prof[:-1])))
            )
            lhs = l2y((1.0 + y) ** (-lam) * anti)
            rhs = (2.0 / (2.0 * lam - 1.0)) * l2y((1.0 + y) ** (1.0 - lam) * prof)
            slack = BASE_SLACK + math.exp(-2.0 * f.a * 30.0)
            r = lhs / (rhs * (1.0 + slack)) if rhs > 0 else 0.0
            if r > worst:
                worst, wit = r, repr(f)
        name = "weighted_hardy_unit" if lam == 1.0 else f"weighted_hardy_lam{lam:g}"
        out.append(
            CheckReport(name, n_samples, worst, 1.0, worst <= 1.0, wit, family.seed)
        )

    # sup-norm variant, lambda~ > 0
    worst = 0.0
    wit = ""
    lam_rng = np.random.default_rng(family.seed + 104729)
    for _ in range(n_samples):
        f = family.sample()
        lam = 0.5 + 1.5 * lam_rng.random()
        prof = f.eval(np.zeros(1), y[None, :], 0, 0)[0] / max(f.amp, 1e-12)
        anti = np.concatenate(([0.0], np.cumsum(0.5 * dy * (prof[1:] + prof[:-1]))))
        lhs = float(np.max(np.abs((1.0 + y) ** (-lam) * anti)))
        rhs = (1.0 / lam) * float(np.max(np.abs((1.0 + y) ** (1.0 - lam) * prof)))
        slack = BASE_SLACK + math.exp(-f.a * 30.0)
        r = lhs / (rhs * (1.0 + slack)) if rhs > 0 else 0.0
        if r > worst:
            worst, wit = r, repr(f)
    out.append(
        CheckReport("weighted_hardy_sup", n_samples, worst, 1.0, worst <= 1.0, wit, family.seed)
    )
    return out


def _spatial_multiindices(total: int):
    for b2 in range(total + 1):
        for k_y in range(total + 1 - b2):
            yield b2, k_y


def _structured_pairs(seed: int, n_coeff: int, decays=(0.3, 0.7, 1.2)):
    """Deterministic sweep of the structural parameters (decay rates and
    wavenumbers) with randomized coefficients: the max ratio over such a
    sweep is a stable statistic, unlike the max over a fully random draw."""
    rng = np.random.default_rng(seed)
    for a_f in decays:
        for a_g in (decays[0], decays[-1]):
            for k_f in (0, 1, 3):
                for k_g in (1, 2):
                    for _ in range(n_coeff):
                        cf = (
                            rng.uniform(0.2, 1.0),
                            rng.uniform(-1.0, 1.0),
                            rng.uniform(-1.0, 1.0),
                        )
                        cg = (
                            rng.uniform(0.2, 1.0),
                            rng.uniform(-1.0, 1.0),
                            rng.uniform(-1.0, 1.0),
                        )
                        yield (
                            TestFn(1.0, k_f, rng.uniform(0.0, 2 * np.pi), cf, a_f),
                            TestFn(1.0, k_g, rng.uniform(0.0, 2 * np.pi), cg, a_g),
                        )


# constants fitted once over a 10-seed structured calibration (432 pairs
# per seed) and frozen; every suite run is a fresh held-out sweep that must
# stay inside the 25% stability margin of the frozen fit
C_BILINEAR_PRODUCT = 0.0396
C_ANTIDERIVATIVE_PRODUCT = 0.0253
HOLDOUT_MARGIN = 1.25


def check_product_estimate(
    family: TestFunctionFamily,
    n_samples: int,
    m: int = 3,
    holdout_margin: float = HOLDOUT_MARGIN,
) -> list:
    """Bilinear product bound against the frozen fitted constant."""
    if m != 3:
        raise ValueError("desk scale pins m = 3")
    grid = Grid(n_x=32, n_y=201, y_max=20.0)
    X, Y = grid.meshgrid()
    n_coeff = max(2, n_samples // 8)

    worst = 0.0
    wit = ""
    for f, g in _structured_pairs(family.seed, n_coeff):
        for l in (0.0, 1.0):
            nf = f.sobolev_norm(grid, m, l / 2.0)
            ng = g.sobolev_norm(grid, m, l / 2.0)
            for b2f, kf in _spatial_multiindices(m):
                for b2g, kg in _spatial_multiindices(m - b2f - kf):
                    prod = f.eval(X, Y, b2f, kf) * g.eval(X, Y, b2g, kg)
                    lhs = _l2(grid, prod, l + kf + kg)
                    r = lhs / (nf * ng) if nf * ng > 0 else 0.0
                    if r > worst:
                        worst, wit = r, f"alpha=({b2f},{kf}),({b2g},{kg}),l={l}"
    passed = worst <= C_BILINEAR_PRODUCT * holdout_margin
    return [
        CheckReport(
            "bilinear_product_fitted",
            n_samples,
            worst / C_BILINEAR_PRODUCT,
            holdout_margin,
            passed,
            wit,
            family.seed,
        )
    ]


def check_antiderivative_products(
    family: TestFunctionFamily,
    n_samples: int,
    holdout_margin: float = HOLDOUT_MARGIN,
) -> list:
    """Mixed wall-antiderivative products, frozen fitted constant."""
    grid = Grid(n_x=32, n_y=201, y_max=20.0)
    X, Y = grid.meshgrid()
    m = 3
    lam = 1.0  # unit-weight case; the general lambda sweep stays one-sided
    n_coeff = max(2, n_samples // 8)

    worst = 0.0
    wit = ""
    for g, h in _structured_pairs(family.seed, n_coeff):
        ng = g.sobolev_norm(grid, m, 0.0 + lam)
        nh = h.sobolev_norm(grid, m, 1.0 - lam)
        for b2g, kg in _spatial_multiindices(m):
            for b2h in range(m + 1 - b2g - kg):
                anti = inv_dy(h.eval(X, Y, b2h, 0), grid)
                prod = g.eval(X, Y, b2g, kg) * anti
                lhs = _l2(grid, prod, 0.0 + kg)
                r = lhs / (ng * nh) if ng * nh > 0 else 0.0
                if r > worst:
                    worst, wit = r, f"alpha=({b2g},{kg}),beta~={b2h}"
    passed = worst <= C_ANTIDERIVATIVE_PRODUCT * holdout_margin
    return [
        CheckReport(
            "antiderivative_product_fitted",
            n_samples,
            worst / C_ANTIDERIVATIVE_PRODUCT,
            holdout_margin,
            passed,
            wit,
            family.seed,
        )
    ]


# ---------------------------------------------------------------------------
# MMS convergence studies


def _integrate(prob, grid: Grid, cfg: SolverConfig, flow, phi) -> HomogeneousState:
    s = prob.state(grid, 0.0)
    forcing = prob.forcing(grid)
    n = int(round(cfg.t_end / cfg.dt))
    for i in range(n):
        s = step(s, flow, phi, cfg, None, i * cfg.dt, forcing)
    return s


def _state_distance(a: HomogeneousState, b_fields, grid: Grid, stride: int = 1) -> float:
    total = 0.0
    for f, rf in zip(a.fields(), b_fields):
        rv = rf.values[::stride] if stride > 1 else rf.values
        total += weighted_l2_sq(Field(grid, f.values - rv), 0.0)
    return float(np.sqrt(total))


@dataclass
class ConvergenceStudy:
    axis: str
    parameters: list
    errors: list
    orders: list

    @property
    def mean_order(self) -> float:
        return float(np.mean(self.orders)) if self.orders else math.nan


def mms_convergence(refinements: dict | None = None) -> dict[str, ConvergenceStudy]:
    """Observed orders in dy, dt, dx on three-level refinement ladders.

    dy errors are measured against the manufactured state; dt and dx errors
    against a reference run refined only in the varied parameter (8x finer
    dt, 3x-6x finer x grid), which isolates the studied error component.
    """
    refinements = refinements or {}
    flow = make_flow("zero")
    phi = CutoffPhi(1.0)
    out = {}

    # dy ladder
    cfg = SolverConfig(dt=2.5e-4, t_end=0.05)
    prob = build_manufactured(cfg, omega=0.5)
    n_ys = refinements.get("n_y", [33, 65, 129])
    errs, params = [], []
    for n_y in n_ys:
        grid = Grid(32, n_y, 8.0)
        s = _integrate(prob, grid, cfg, flow, phi)
        errs.append(prob.error(s, cfg.t_end))
        params.append(grid.dy)
    orders = [
        math.log(errs[i] / errs[i + 1]) / math.log(params[i] / params[i + 1])
        for i in range(len(errs) - 1)
    ]
    out["dy"] = ConvergenceStudy("dy", params, errs, orders)

    # dt ladder
    cfg = SolverConfig(dt=0.02, t_end=0.2)
    prob = build_manufactured(cfg, omega=3.0)
    grid = Grid(16, 129, 8.0)
    dts = refinements.get("dt", [0.02, 0.01, 0.005])
    ref = _integrate(prob, grid, replace(cfg, dt=min(dts) / 8.0), flow, phi)
    errs = []
    for dt in dts:
        s = _integrate(prob, grid, replace(cfg, dt=dt), flow, phi)
        errs.append(_state_distance(s, ref.fields(), grid))
    orders = [
        math.log(errs[i] / errs[i + 1]) / math.log(dts[i] / dts[i + 1])
        for i in range(len(errs) - 1)
    ]
    out["dt"] = ConvergenceStudy("dt", list(dts), errs, orders)

    # dx ladder
    cfg = SolverConfig(dt=2.5e-4, t_end=0.05)
    prob = build_manufactured(cfg, omega=0.5)
    n_xs = refinements.get("n_x", [8, 12, 16])
    n_ref = int(np.lcm.reduce(n_xs))
    while n_ref < 3 * max(n_xs):
        n_ref *= 2
    ref = _integrate(prob, Grid(n_ref, 129, 8.0), cfg, flow, phi)
    errs, params = [], []
    for n_x in n_xs:
        grid = Grid(n_x, 129, 8.0)
        s = _integrate(prob, grid, cfg, flow, phi)
        errs.append(_state_distance(s, ref.fields(), grid, stride=n_ref // n_x))
        params.append(grid.dx)
    orders = [
        math.log(errs[i] / errs[i + 1]) / math.log(params[i] / params[i + 1])
        for i in range(len(errs) - 1)
    ]
    out["dx"] = ConvergenceStudy("dx", params, errs, orders)
    return out


def mms_steady_floor(t_end: float = 0.1) -> tuple[float, float]:
    """Steady manufactured state: the error must sit at a t-independent floor."""
    flow = make_flow("zero")
    phi = CutoffPhi(1.0)
    cfg = SolverConfig(dt=1e-3, t_end=t_end)
    prob = build_manufactured(cfg, omega=0.0)
    grid = Grid(16, 65, 8.0)
    s = prob.state(grid, 0.0)
    forcing = prob.forcing(grid)
    n = int(round(cfg.t_end / cfg.dt))
    half = None
    for i in range(n):
        s = step(s, flow, phi, cfg, None, i * cfg.dt, forcing)
        if i == n // 2:
            half = prob.error(s, (i + 1) * cfg.dt)
    return half, prob.error(s, cfg.t_end)


# ---------------------------------------------------------------------------
# epsilon study


@dataclass
class EpsilonStudy:
    epsilons: list
    differences: list  # ||state(eps_i) - state(eps_{i+1})|| at t_end
    norms: list  # H^2_l norms at t_end per epsilon
    horizons: list  # measured floor horizons

    @property
    def monotone(self) -> bool:
        return all(
            self.differences[i] >= self.differences[i + 1] - 1e-15
            for i in range(len(self.differences) - 1)
        )

    @property
    def norm_spread(self) -> float:
        lo, hi = min(self.norms), max(self.norms)
        return (hi - lo) / hi if hi > 0 else 0.0

    @property
    def horizon_spread(self) -> float:
        lo, hi = min(self.horizons), max(self.horizons)
        return (hi - lo) / hi if hi > 0 else 0.0


def epsilon_study(
    s0: HomogeneousState,
    flow: OuterFlow,
    phi: CutoffPhi,
    cfg: SolverConfig,
    epsilons,
) -> EpsilonStudy:
    epsilons = list(epsilons)
    if len(epsilons) < 3:
        raise ValueError("need at least 3 epsilon values")
    if any(a <= b for a, b in zip(epsilons, epsilons[1:])):
        raise ValueError("epsilon list must be strictly descending")
    from .norms import weighted_sobolev_norm

    grid = s0.grid
    states, norms, horizons = [], [], []
    for eps in epsilons:
        cfg_i = replace(cfg, epsilon=eps)
        res = run(s0, flow, phi, cfg_i)
        states.append(res.state)
        spec = WeightedNormSpec(m=2, l=cfg.monitor_l)
        norms.append(weighted_sobolev_norm(list(res.state.fields()), spec))
        horizons.append(res.floor_horizon)
    diffs = [
        _state_distance(a, b.fields(), grid)
        for a, b in zip(states, states[1:])
    ]
    return EpsilonStudy(epsilons, diffs, norms, horizons)


# ---------------------------------------------------------------------------
# uniqueness contraction


@dataclass
class DifferenceState:
    """Transformed difference of two trajectories at one time."""

    u_bar: Field
    theta_bar: Field
    h_bar: Field
    psi_tilde: Field

    def energy(self) -> float:
        return float(
            sum(weighted_l2_sq(f, 0.0) for f in (self.u_bar, self.theta_bar, self.h_bar))
        )

    def boundary_residuals(self) -> tuple[float, float, float]:
        g = self.u_bar.grid
        return (
            float(np.max(np.abs(self.u_bar.values[:, 0]))),
            float(np.max(np.abs(self.theta_bar.values[:, 0]))),
            float(np.max(np.abs(ddy(self.h_bar).values[:, 0]))),
        )


def difference_transform(
    sa: HomogeneousState,
    sb: HomogeneousState,
    flow: OuterFlow,
    phi: CutoffPhi,
    cfg: SolverConfig,
    t: float,
    coefficients_from: str = "b",
) -> DifferenceState:
    """(u_bar, theta_bar, h_bar) built with the selected solution's etas."""
    grid = sa.grid
    ref = sb if coefficients_from == "b" else sa
    denom = ref.h.values + flow.H(t, grid.x)[:, None] * phi.profile(grid.y, 1)
    if np.min(denom) < cfg.delta0:
        raise ValueError(
            f"reference solution broke the floor: min {np.min(denom):.3e}"
        )
    p2 = phi.profile(grid.y, 2)
    x = grid.x
    eta4 = (ddy(ref.u.values, 1, grid) + flow.U(t, x)[:, None] * p2) / denom
    eta5 = (ddy(ref.theta.values, 1, grid) + flow.Theta(t, x)[:, None] * p2) / denom
    eta6 = (ddy(ref.h.values, 1, grid) + flow.H(t, x)[:, None] * p2) / denom

    du = sa.u.values - sb.u.values
    dth = sa.theta.values - sb.theta.values
    dh = sa.h.values - sb.h.values
    psi = inv_dy(dh, grid)
    return DifferenceState(
        u_bar=Field(grid, du - eta4 * psi),
        theta_bar=Field(grid, dth - eta5 * psi),
        h_bar=Field(grid, dh - eta6 * psi),
        psi_tilde=Field(grid, psi),
    )


def psi_reconstruction_residual(
    diff: DifferenceState,
    sb: HomogeneousState,
    flow: OuterFlow,
    phi: CutoffPhi,
    t: float,
) -> float:
    """Rebuild psi~ from h_bar through the quotient identity; max deviation."""
    grid = sb.grid
    denom = sb.h.values + flow.H(t, grid.x)[:, None] * phi.profile(grid.y, 1)
    rebuilt = denom * inv_dy(diff.h_bar.values / denom, grid)
    return float(np.max(np.abs(rebuilt - diff.psi_tilde.values)))


@dataclass
class ContractionReport:
    times: list
    energies: list
    rate: float  # fitted d/dt log E
    psi_residual: float
    swap_rate: float

    @property
    def initial_energy(self) -> float:
        return self.energies[0]

    @property
    def sup_energy(self) -> float:
        return max(self.energies)


def uniqueness_contraction(
    s0a: HomogeneousState,
    s0b: HomogeneousState,
    flow: OuterFlow,
    phi: CutoffPhi,
    cfg: SolverConfig,
) -> ContractionReport:
    """Evolve both states; track E(t) of the transformed difference."""
    grid = s0a.grid
    sa, sb = s0a.copy(), s0b.copy()
    n_steps = int(round(cfg.t_end / cfg.dt))
    times = [0.0]
    d0 = difference_transform(sa, sb, flow, phi, cfg, 0.0)
    energies = [d0.energy()]
    swap_energies = [
        difference_transform(sa, sb, flow, phi, cfg, 0.0, "a").energy()
    ]
    for i in range(n_steps):
        t = i * cfg.dt
        sa = step(sa, flow, phi, cfg, None, t)
        sb = step(sb, flow, phi, cfg, None, t)
        t_new = (i + 1) * cfg.dt
        if (i + 1) % cfg.monitor_every == 0 or i == n_steps - 1:
            times.append(t_new)
            energies.append(
                difference_transform(sa, sb, flow, phi, cfg, t_new).energy()
            )
            swap_energies.append(
                difference_transform(sa, sb, flow, phi, cfg, t_new, "a").energy()
            )
    final_diff = difference_transform(sa, sb, flow, phi, cfg, times[-1])
    psi_res = psi_reconstruction_residual(final_diff, sb, flow, phi, times[-1])

    def fit_rate(es):
        pts = [(t, e) for t, e in zip(times, es) if e > 0.0]
        if len(pts) < 2:
            return 0.0
        ts = np.array([p[0] for p in pts])
        ls = np.log([p[1] for p in pts])
        slope = np.polyfit(ts, ls, 1)[0]
        return float(slope)

    return ContractionReport(
        times=times,
        energies=energies,
        rate=fit_rate(energies),
        psi_residual=psi_res,
        swap_rate=fit_rate(swap_energies),
    )


# ---------------------------------------------------------------------------
# CLI-facing suite wrappers


def verify_inequalities(seed: int = 7, n_samples: int = 100) -> list:
    family = TestFunctionFamily(seed=seed)
    reports = []
    reports += check_trace_inequality(family, n_samples)
    reports += check_hardy(family, n_samples)
    reports += check_product_estimate(family, max(8, n_samples // 5))
    reports += check_antiderivative_products(family, max(8, n_samples // 5))
    sat = trace_saturation_ratio()
    reports.append(
        CheckReport(
            "trace_saturation",
            1,
            sat,
            1.0 + BASE_SLACK,
            abs(sat - 1.0) <= BASE_SLACK,
            "f=a(x)exp(-y)",
            seed,
        )
    )
    return [r.as_dict() for r in reports]


def verify_mms(seed: int = 7, n_samples: int = 0) -> list:
    studies = mms_convergence()
    checks = []
    dy = studies["dy"].mean_order
    checks.append(
        CheckReport(
            "mms_order_dy", len(studies["dy"].errors), dy, 2.0,
            abs(dy - 2.0) <= 0.4,
        )
    )
    dt = studies["dt"].mean_order
    checks.append(
        CheckReport(
            "mms_order_dt", len(studies["dt"].errors), dt, 1.0,
            abs(dt - 1.0) <= 0.3,
        )
    )
    dx = studies["dx"].mean_order
    checks.append(
        CheckReport(
            "mms_order_dx", len(studies["dx"].errors), dx, 3.0, dx >= 3.0
        )
    )
    return [c.as_dict() for c in checks]


def _floor_setup(dt: float = 2e-3, t_end: float = 0.25):
    cfg = SolverConfig(
        dt=dt, t_end=t_end, monitor_every=10, corrector_order=1, delta0=0.1
    )
    grid = Grid(16, 129, 8.0)
    phi = CutoffPhi(1.0)
    flow = make_flow("constants", h0=0.5)
    s0 = make_initial_state("floor", grid, phi, cfg)
    return s0, flow, phi, cfg


def verify_epsilon(seed: int = 7, n_samples: int = 0) -> list:
    s0, flow, phi, cfg = _floor_setup()
    study = epsilon_study(s0, flow, phi, cfg, [1e-2, 5e-3, 2.5e-3])
    checks = [
        CheckReport(
            "epsilon_cauchy_monotone",
            len(study.epsilons),
            study.differences[-1] / study.differences[0]
            if study.differences[0] > 0
            else 0.0,
            1.0,
            study.monotone,
        ),
        CheckReport(
            "epsilon_uniform_norm",
            len(study.epsilons),
            study.norm_spread,
            0.10,
            study.norm_spread <= 0.10,
        ),
        CheckReport(
            "epsilon_horizon_stability",
            len(study.epsilons),
            study.horizon_spread,
            0.05,
            study.horizon_spread <= 0.05 and min(study.horizons) >= 0.2,
        ),
    ]
    return [c.as_dict() for c in checks]


def verify_uniqueness(seed: int = 7, n_samples: int = 0) -> list:
    s0, flow, phi, cfg = _floor_setup(dt=2e-3, t_end=0.2)
    grid = s0.grid
    checks = []

    same = uniqueness_contraction(s0, s0.copy(), flow, phi, cfg)
    checks.append(
        CheckReport(
            "uniqueness_identical_data",
            len(same.energies),
            same.sup_energy,
            1e-20,
            same.sup_energy <= 1e-20,
        )
    )

    s0b = make_initial_state("perturbed_floor", grid, phi, cfg, perturb=1e-6)
    rep = uniqueness_contraction(s0, s0b, flow, phi, cfg)
    rep_half = uniqueness_contraction(
        s0, s0b, flow, phi, replace(cfg, dt=cfg.dt / 2.0)
    )
    drift = abs(rep_half.rate - rep.rate) / max(abs(rep.rate), 1e-12)
    checks.append(
        CheckReport(
            "uniqueness_rate_dt_stable",
            len(rep.energies),
            drift,
            0.15,
            drift <= 0.15 and math.isfinite(rep.rate),
        )
    )

    sups = []
    e0s = []
    for size in (1e-4, 1e-6, 1e-8):
        s0p = make_initial_state("perturbed_floor", grid, phi, cfg, perturb=size)
        r = uniqueness_contraction(s0, s0p, flow, phi, cfg)
        sups.append(r.sup_energy)
        e0s.append(r.initial_energy)
    monotone = all(s1 > s2 for s1, s2 in zip(sups, sups[1:]))
    checks.append(
        CheckReport(
            "uniqueness_perturbation_monotone",
            3,
            sups[-1] / sups[0] if sups[0] > 0 else 0.0,
            1.0,
            monotone,
        )
    )
    checks.append(
        CheckReport(
            "uniqueness_psi_reconstruction",
            1,
            rep.psi_residual,
            1e-3,
            rep.psi_residual <= 1e-3,
        )
    )
    return [c.as_dict() for c in checks]


def grid_study_rows() -> list:
    rows = []
    for axis, study in mms_convergence().items():
        for i, (p, e) in enumerate(zip(study.parameters, study.errors)):
            order = study.orders[i - 1] if i > 0 else math.nan
            rows.append((axis, p, e, order))
    return rows


def epsilon_study_rows(setup=None) -> list:
    if setup is None:
        s0, flow, phi, cfg = _floor_setup()
    else:
        s0 = make_initial_state(
            setup.init_preset, setup.grid, setup.phi, setup.cfg, **setup.init_params
        )
        flow, phi, cfg = setup.flow, setup.phi, setup.cfg
    study = epsilon_study(s0, flow, phi, cfg, [1e-2, 5e-3, 2.5e-3])
    rows = []
    for i, (eps, d) in enumerate(zip(study.epsilons[:-1], study.differences)):
        order = (
            math.log(study.differences[i - 1] / d) / math.log(2.0)
            if i > 0 and d > 0
            else math.nan
        )
        rows.append(("epsilon", eps, d, order))
    return rows
