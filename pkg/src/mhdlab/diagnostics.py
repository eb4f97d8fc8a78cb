"""Structural diagnostics: stream function, cancellation quantities, monitors.

The cancellation quantities remove the tangential-derivative loss caused by
the wall-normal transport terms: with eta_i = (dy f + F phi'')/(h + H phi')
for f in (u, theta, h) and F the matching trace, the combinations

    f_beta = dtau^beta f - eta_i * dtau^beta psi,    psi = inv_dy(h),

are almost norm-equivalent to dtau^beta f with equivalence constant M(t).
Every quantity here is a pure function of a state snapshot; monitors never
mutate the state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SolverConfig
from .grid import Field
from .homogenize import HomogeneousState
from .norms import WeightedNormSpec, sup_weighted, weighted_l2_sq, weighted_sobolev_norm
from .operators import ddx, ddy, inv_dy
from .outer_flow import CutoffPhi, OuterFlow


class MagneticFloorBreach(RuntimeError):
    """h + H phi' dropped below delta0 somewhere; reports the minimum node."""

    def __init__(self, value: float, where: tuple):
        self.value = value
        self.where = where
        super().__init__(
            f"magnetic floor breached: min(h + H phi') = {value:.6g} at node {where}"
        )


def stream_function(h: Field) -> Field:
    """psi with h = dy psi and psi(y=0) = 0."""
    return inv_dy(h)


def _floor_denominator(
    s: HomogeneousState, flow: OuterFlow, phi: CutoffPhi, cfg: SolverConfig, t: float
):
    grid = s.grid
    denom = s.h.values + flow.H(t, grid.x)[:, None] * phi.profile(grid.y, 1)
    mn = float(np.min(denom))
    if mn < cfg.delta0:
        where = np.unravel_index(int(np.argmin(denom)), denom.shape)
        raise MagneticFloorBreach(mn, tuple(int(w) for w in where))
    return denom


def eta_coefficients(
    s: HomogeneousState, flow: OuterFlow, phi: CutoffPhi, cfg: SolverConfig, t: float
) -> tuple[Field, Field, Field]:
    """(eta1, eta2, eta3): nodewise quotients behind the cancellation trick."""
    grid = s.grid
    denom = _floor_denominator(s, flow, phi, cfg, t)
    p2 = phi.profile(grid.y, 2)
    x = grid.x
    eta1 = (ddy(s.u.values, 1, grid) + flow.U(t, x)[:, None] * p2) / denom
    eta2 = (ddy(s.theta.values, 1, grid) + flow.Theta(t, x)[:, None] * p2) / denom
    eta3 = (ddy(s.h.values, 1, grid) + flow.H(t, x)[:, None] * p2) / denom
    return Field(grid, eta1), Field(grid, eta2), Field(grid, eta3)


def _tangential_derivative(
    s: HomogeneousState,
    flow: OuterFlow,
    phi: CutoffPhi,
    cfg: SolverConfig,
    t: float,
    beta: tuple,
    correctors=None,
    forcing=None,
):
    """dtau^beta of (u, theta, h) and of psi; dt entries by RHS substitution."""
    b1, b2 = beta
    if b1 + b2 > 2:
        raise ValueError("|beta| <= 2 at desk scale")
    if b1 > 1:
        raise ValueError(
            "second time derivatives are not substituted (listed limitation)"
        )
    grid = s.grid
    if b1 == 0:
        base = [f.values for f in s.fields()]
    else:
        from .solver import rhs_regularized

        rhs = rhs_regularized(s, flow, phi, cfg, correctors, t, forcing)
        base = [f.values for f in rhs]
    for _ in range(b2):
        base = [ddx(arr, 1, grid) for arr in base]
    psi_beta = inv_dy(base[2], grid)
    return base, psi_beta


def cancellation_quantities(
    s: HomogeneousState,
    flow: OuterFlow,
    phi: CutoffPhi,
    cfg: SolverConfig,
    t: float,
    beta: tuple,
    correctors=None,
    forcing=None,
) -> tuple[Field, Field, Field]:
    """(u_beta, theta_beta, h_beta) = dtau^beta(u, theta, h) - eta * dtau^beta psi."""
    grid = s.grid
    etas = eta_coefficients(s, flow, phi, cfg, t)
    base, psi_beta = _tangential_derivative(
        s, flow, phi, cfg, t, beta, correctors, forcing
    )
    return tuple(
        Field(grid, arr - eta.values * psi_beta)
        for arr, eta in zip(base, etas)
    )


def m_of_t(s: HomogeneousState, flow: OuterFlow, cfg: SolverConfig, t: float) -> float:
    """Equivalence constant M(t); the generic embedding constant is fixed to 1."""
    lw = cfg.monitor_l + 1.0
    sup1 = max(sup_weighted(ddy(f), lw) for f in s.fields())
    sup2 = max(sup_weighted(ddy(f, 2), lw) for f in s.fields())
    sup_flow = flow.sup_uth(t)
    inv = 2.0 / cfg.delta0
    return inv * (sup_flow + sup1) + inv * (sup2 + 1.0)


@dataclass
class EquivalenceReport:
    ratio_lo: float  # ||(u_b, th_b, h_b)|| / ||dtau^beta(u, th, h)||, in [1/M, M]
    ratio_hi: float  # dy-variant ratio, <= 1
    m_value: float
    passed: bool
    trivial: bool = False


def norm_equivalence_check(
    s: HomogeneousState,
    flow: OuterFlow,
    phi: CutoffPhi,
    cfg: SolverConfig,
    t: float,
    beta: tuple = (0, 1),
    tol: float = 0.05,
) -> EquivalenceReport:
    """Measure the almost-equivalence ratios for one tangential multi-index."""
    grid = s.grid
    M = m_of_t(s, flow, cfg, t)
    l = cfg.monitor_l
    base, psi_beta = _tangential_derivative(s, flow, phi, cfg, t, beta)
    n_base_sq = sum(weighted_l2_sq(Field(grid, arr), l) for arr in base)
    if n_base_sq < 1e-28:
        return EquivalenceReport(1.0, 0.0, M, True, trivial=True)

    etas = eta_coefficients(s, flow, phi, cfg, t)
    quants = [arr - eta.values * psi_beta for arr, eta in zip(base, etas)]
    n_quant_sq = sum(weighted_l2_sq(Field(grid, arr), l) for arr in quants)

    ratio_lo = float(np.sqrt(n_quant_sq / n_base_sq))
    dy_base_sq = sum(
        weighted_l2_sq(Field(grid, ddy(arr, 1, grid)), l) for arr in base
    )
    dy_quant = np.sqrt(
        sum(weighted_l2_sq(Field(grid, ddy(arr, 1, grid)), l) for arr in quants)
    )
    h_beta_norm = np.sqrt(weighted_l2_sq(Field(grid, quants[2]), l))
    ratio_hi = float(np.sqrt(dy_base_sq) / (dy_quant + M * h_beta_norm))

    ok = (1.0 - tol) / M <= ratio_lo <= M * (1.0 + tol) and ratio_hi <= 1.0 + tol
    return EquivalenceReport(ratio_lo, ratio_hi, M, ok)


HISTORY_COLUMNS = (
    "t",
    "norm_h2l",
    "min_theta_total",
    "min_h_total",
    "div_u",
    "div_h",
    "m_of_t",
    "equiv_ratio_lo",
    "equiv_ratio_hi",
    "sup_dy1",
    "sup_dy2",
    "abort",
)

HISTORY_SCHEMA = "mhdlab.history.v1"


@dataclass
class MonitorReport:
    """One frozen row of the run history."""

    t: float
    norm_h2l: float
    min_theta_total: float
    min_h_total: float
    div_u: float
    div_h: float
    m_of_t: float
    equiv_ratio_lo: float
    equiv_ratio_hi: float
    sup_dy1: float
    sup_dy2: float
    abort: str = ""
    equiv_pass: bool = True

    def finite(self) -> bool:
        vals = [
            self.t, self.norm_h2l, self.min_theta_total, self.min_h_total,
            self.div_u, self.div_h, self.m_of_t, self.equiv_ratio_lo,
            self.equiv_ratio_hi, self.sup_dy1, self.sup_dy2,
        ]
        return bool(np.isfinite(vals).all())

    def csv_row(self) -> str:
        vals = [
            self.t, self.norm_h2l, self.min_theta_total, self.min_h_total,
            self.div_u, self.div_h, self.m_of_t, self.equiv_ratio_lo,
            self.equiv_ratio_hi, self.sup_dy1, self.sup_dy2,
        ]
        return ",".join(f"{v:.17g}" for v in vals) + f",{self.abort}"


def monitor_report(
    s: HomogeneousState, flow: OuterFlow, phi: CutoffPhi, cfg: SolverConfig, t: float
) -> MonitorReport:
    grid = s.grid
    p1 = phi.profile(grid.y, 1)
    x = grid.x
    th_tot = s.theta.values + flow.Theta(t, x)[:, None] * p1
    h_tot = s.h.values + flow.H(t, x)[:, None] * p1
    v, g = s.vg
    div_u = float(np.max(np.abs(ddx(s.u.values, 1, grid) + ddy(v.values, 1, grid))))
    div_h = float(np.max(np.abs(ddx(s.h.values, 1, grid) + ddy(g.values, 1, grid))))
    spec = WeightedNormSpec(m=cfg.monitor_m, l=cfg.monitor_l)
    norm = weighted_sobolev_norm(list(s.fields()), spec)
    lw = cfg.monitor_l + 1.0
    sup1 = max(sup_weighted(ddy(f), lw) for f in s.fields())
    sup2 = max(sup_weighted(ddy(f, 2), lw) for f in s.fields())
    M = m_of_t(s, flow, cfg, t)

    min_h = float(np.min(h_tot))
    if min_h >= cfg.delta0:
        eq = norm_equivalence_check(s, flow, phi, cfg, t)
    else:
        eq = EquivalenceReport(1.0, 0.0, M, True, trivial=True)

    return MonitorReport(
        t=t,
        norm_h2l=norm,
        min_theta_total=float(np.min(th_tot)),
        min_h_total=min_h,
        div_u=div_u,
        div_h=div_h,
        m_of_t=M,
        equiv_ratio_lo=eq.ratio_lo,
        equiv_ratio_hi=eq.ratio_hi,
        sup_dy1=sup1,
        sup_dy2=sup2,
        equiv_pass=eq.passed,
    )


def write_history(path, reports) -> None:
    with open(path, "w") as fh:
        fh.write(f"# schema={HISTORY_SCHEMA}\n")
        fh.write(",".join(HISTORY_COLUMNS) + "\n")
        for rep in reports:
            fh.write(rep.csv_row() + "\n")
