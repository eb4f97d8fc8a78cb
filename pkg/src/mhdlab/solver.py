"""IMEX time integration of the regularized homogenized boundary-layer system.

Splitting: the wall-normal diffusion terms (the stiff direction under
boundary-layer scaling) go implicit through per-column tridiagonal solves
with coefficients frozen at the current state; advection, magnetic coupling,
heating, the eps*dxx regularization, and all sources stay explicit. The
variable viscosity mu*(theta + Theta*phi' + 1) is averaged to half-nodes so
the implicit operator is conservative and strictly diagonally dominant
whenever the parabolicity floor theta + Theta*phi' + 1 > 0 holds.

Boundary rows enforce u = theta = 0 and the reflected-ghost Neumann
condition dy h = 0 at the wall, and homogeneous Dirichlet for all three at
the truncation height.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .config import SolverConfig
from .grid import Field, Grid
from .homogenize import HomogeneousState, source_terms
from .kernels import thomas_solve
from .operators import ddx, ddy, inv_dy
from .outer_flow import CutoffPhi, OuterFlow


class DegenerateViscosity(RuntimeError):
    """theta + Theta*phi' + 1 lost positivity; the parabolic term degenerates."""


class NonFiniteField(RuntimeError):
    pass


class CFLViolation(RuntimeError):
    pass


class HypothesisViolation(RuntimeError):
    """Initial data fails a well-posedness hypothesis check."""


@dataclass
class CorrectorSet:
    """Time-polynomial correctors restoring dt^i matching at t=0.

    d2x[i] holds dxx of the i-th time derivative triple of (u, theta, h) at
    t=0; inv4[i] the wall antiderivative of the h component (stream-function
    corrector). The corrector fields at time t are
    -(sum_i t^i/i! * stored[i]) and enter the sources multiplied by eps.
    """

    d2x: list  # list of (arr_u, arr_th, arr_h) per order
    inv4: list  # list of arr per order

    @property
    def order(self) -> int:
        return len(self.d2x) - 1

    def evaluate(self, t: float):
        """(r~1, r~2, r~3) arrays at time t."""
        acc_u = acc_th = acc_h = 0.0
        fac = 1.0
        for i, (du, dth, dh) in enumerate(self.d2x):
            if i > 0:
                fac *= i
            w = t**i / fac
            acc_u = acc_u - w * du
            acc_th = acc_th - w * dth
            acc_h = acc_h - w * dh
        return acc_u, acc_th, acc_h

    def evaluate_r4(self, t: float):
        acc = 0.0
        fac = 1.0
        for i, arr in enumerate(self.inv4):
            if i > 0:
                fac *= i
            acc = acc - (t**i / fac) * arr
        return acc


class _TraceArrays:
    """Outer-flow columns and cutoff rows evaluated once per (t, grid)."""

    def __init__(self, flow: OuterFlow, phi: CutoffPhi, grid: Grid, t: float):
        x, y = grid.x, grid.y
        col = lambda fn, b1=0, b2=0: fn(t, x, b1, b2)[:, None]
        self.U = col(flow.U)
        self.U_x = col(flow.U, 0, 1)
        self.Th = col(flow.Theta)
        self.Th_x = col(flow.Theta, 0, 1)
        self.H = col(flow.H)
        self.H_x = col(flow.H, 0, 1)
        self.p0 = phi.profile(y, 0)
        self.p1 = phi.profile(y, 1)
        self.p2 = phi.profile(y, 2)
        self.p3 = phi.profile(y, 3)


def viscosity_coefficient(s: HomogeneousState, tr: _TraceArrays, grid: Grid):
    """a = theta + Theta*phi' + 1; raises if the parabolic floor is lost."""
    a = s.theta.values + tr.Th * tr.p1 + 1.0
    if np.min(a) <= 0.0:
        raise DegenerateViscosity(
            f"min(theta + Theta*phi' + 1) = {np.min(a):.3e} <= 0"
        )
    return a


def _conservative_dy(a, f, dy):
    """d/dy(a d/dy f) with half-node a; one-sided expansion on edge rows."""
    out = np.empty_like(f)
    am = 0.5 * (a[:, 1:] + a[:, :-1])  # a at j+1/2, shape (n_x, n_y-1)
    out[:, 1:-1] = (
        am[:, 1:] * (f[:, 2:] - f[:, 1:-1]) - am[:, :-1] * (f[:, 1:-1] - f[:, :-2])
    ) / (dy * dy)
    # edge rows: non-conservative a*f_yy + a_y*f_y with one-sided stencils
    fy0 = (-3.0 * f[:, 0] + 4.0 * f[:, 1] - f[:, 2]) / (2.0 * dy)
    fyy0 = (2.0 * f[:, 0] - 5.0 * f[:, 1] + 4.0 * f[:, 2] - f[:, 3]) / (dy * dy)
    ay0 = (-3.0 * a[:, 0] + 4.0 * a[:, 1] - a[:, 2]) / (2.0 * dy)
    out[:, 0] = a[:, 0] * fyy0 + ay0 * fy0
    fy1 = (3.0 * f[:, -1] - 4.0 * f[:, -2] + f[:, -3]) / (2.0 * dy)
    fyy1 = (2.0 * f[:, -1] - 5.0 * f[:, -2] + 4.0 * f[:, -3] - f[:, -4]) / (dy * dy)
    ay1 = (3.0 * a[:, -1] - 4.0 * a[:, -2] + a[:, -3]) / (2.0 * dy)
    out[:, -1] = a[:, -1] * fyy1 + ay1 * fy1
    return out


def _explicit_terms(
    s: HomogeneousState,
    flow: OuterFlow,
    phi: CutoffPhi,
    cfg: SolverConfig,
    correctors: CorrectorSet | None,
    t: float,
    forcing=None,
):
    """Time-derivative contributions of everything except y-diffusion.

    Returns (E_u, E_th, E_h) plus the cached trace arrays and viscosity
    coefficient so the stepper can reuse them.
    """
    grid = s.grid
    tr = _TraceArrays(flow, phi, grid, t)
    a = viscosity_coefficient(s, tr, grid)

    u, th, h = s.u.values, s.theta.values, s.h.values
    v, g = (f.values for f in s.vg)
    mu, kappa, nu, c_v, eps = cfg.mu, cfg.kappa, cfg.nu, cfg.c_v, cfg.epsilon

    u_x = ddx(u, 1, grid)
    u_y = ddy(u, 1, grid)
    th_x = ddx(th, 1, grid)
    th_y = ddy(th, 1, grid)
    h_x = ddx(h, 1, grid)
    h_y = ddy(h, 1, grid)

    vel_x = u + tr.U * tr.p1  # tangential transport speed
    vel_y = v - tr.U_x * tr.p0
    mag_x = h + tr.H * tr.p1
    mag_y = g - tr.H_x * tr.p0

    r1, r2, r3, _ = source_terms(grid, flow, phi, cfg, t)
    r1v, r2v, r3v = r1.values, r2.values, r3.values
    if eps > 0.0 and correctors is not None:
        c1, c2, c3 = correctors.evaluate(t)
        r1v = r1v + eps * c1
        r2v = r2v + eps * c2
        r3v = r3v + eps * c3

    E_u = (
        r1v
        - (vel_x * u_x + vel_y * u_y)
        + (mag_x * h_x + mag_y * h_y)
        + eps * ddx(u, 2, grid)
        - tr.U_x * tr.p1 * u
        - tr.U * tr.p2 * v
        + tr.H_x * tr.p1 * h
        + tr.H * tr.p2 * g
        + mu * tr.U * tr.p3 * th
        + mu * tr.U * tr.p2 * th_y
    )

    heating = (
        mu * th * u_y**2
        + mu * (tr.U * tr.p2) ** 2 * th
        + 2.0 * mu * tr.U * tr.p2 * th * u_y
        + mu * tr.Th * tr.p1 * u_y**2
        + 2.0 * mu * tr.Th * tr.U * tr.p1 * tr.p2 * u_y
        + 2.0 * mu * tr.U * tr.p2 * u_y
        + mu * u_y**2
        + nu * h_y**2
        + 2.0 * nu * tr.H * tr.p2 * h_y
    )
    E_th = (
        r2v
        - c_v * (vel_x * th_x + vel_y * th_y)
        + eps * ddx(th, 2, grid)
        - c_v * tr.Th_x * tr.p1 * u
        - c_v * tr.Th * tr.p2 * v
        + heating
    ) / c_v

    E_h = (
        r3v
        - (vel_x * h_x + vel_y * h_y)
        + (mag_x * u_x + mag_y * u_y)
        + eps * ddx(h, 2, grid)
        - tr.H_x * tr.p1 * u
        - tr.H * tr.p2 * v
        + tr.U_x * tr.p1 * h
        + tr.U * tr.p2 * g
    )

    if forcing is not None:
        fu, fth, fh = forcing(t)
        E_u = E_u + fu
        E_th = E_th + fth / c_v
        E_h = E_h + fh

    return E_u, E_th, E_h, tr, a


def rhs_regularized(
    s: HomogeneousState,
    flow: OuterFlow,
    phi: CutoffPhi,
    cfg: SolverConfig,
    correctors: CorrectorSet | None = None,
    t: float = 0.0,
    forcing=None,
) -> tuple[Field, Field, Field]:
    """Instantaneous time derivatives (du, dtheta, dh) of the full system."""
    grid = s.grid
    E_u, E_th, E_h, _, a = _explicit_terms(s, flow, phi, cfg, correctors, t, forcing)
    dy = grid.dy
    du = E_u + cfg.mu * _conservative_dy(a, s.u.values, dy)
    ones = np.ones_like(a)
    dth = E_th + (cfg.kappa / cfg.c_v) * _conservative_dy(ones, s.theta.values, dy)
    dh = E_h + cfg.nu * _conservative_dy(ones, s.h.values, dy)
    for name, arr in (("du", du), ("dtheta", dth), ("dh", dh)):
        if not np.isfinite(arr).all():
            raise NonFiniteField(f"{name} contains non-finite entries")
    return Field(grid, du), Field(grid, dth), Field(grid, dh)


def _check_cfl(s, tr, cfg, grid):
    vel_x = np.max(np.abs(s.u.values + tr.U * tr.p1))
    vel_y = np.max(np.abs(s.vg[0].values - tr.U_x * tr.p0))
    limit = math.inf
    if vel_x > 1e-14:
        limit = min(limit, grid.dx / vel_x)
    if vel_y > 1e-14:
        limit = min(limit, grid.dy / vel_y)
    if cfg.epsilon > 0.0:
        limit = min(limit, grid.dx**2 / (2.0 * cfg.epsilon))
    if cfg.dt > cfg.cfl_safety * limit:
        raise CFLViolation(
            f"dt = {cfg.dt:.3e} exceeds stability bound "
            f"{cfg.cfl_safety * limit:.3e}"
        )


def step(
    s: HomogeneousState,
    flow: OuterFlow,
    phi: CutoffPhi,
    cfg: SolverConfig,
    correctors: CorrectorSet | None = None,
    t: float = 0.0,
    forcing=None,
) -> HomogeneousState:
    """One IMEX step from t to t + dt."""
    grid = s.grid
    dt, dy = cfg.dt, grid.dy
    E_u, E_th, E_h, tr, a = _explicit_terms(s, flow, phi, cfg, correctors, t, forcing)
    _check_cfl(s, tr, cfg, grid)

    n_x, n_y = grid.n_x, grid.n_y

    def dirichlet_rows(lower, diag, upper, rhs, wall=True, top=True):
        if wall:
            diag[:, 0], upper[:, 0], lower[:, 0], rhs[:, 0] = 1.0, 0.0, 0.0, 0.0
        if top:
            diag[:, -1], upper[:, -1], lower[:, -1], rhs[:, -1] = 1.0, 0.0, 0.0, 0.0

    # u: variable-coefficient implicit viscosity
    r = dt * cfg.mu / (dy * dy)
    am = 0.5 * (a[:, 1:] + a[:, :-1])
    lower = np.zeros((n_x, n_y))
    upper = np.zeros((n_x, n_y))
    diag = np.ones((n_x, n_y))
    lower[:, 1:-1] = -r * am[:, :-1]
    upper[:, 1:-1] = -r * am[:, 1:]
    diag[:, 1:-1] = 1.0 + r * (am[:, :-1] + am[:, 1:])
    rhs = s.u.values + dt * E_u
    dirichlet_rows(lower, diag, upper, rhs)
    u_new = thomas_solve(lower, diag, upper, rhs)

    # theta: constant-coefficient implicit conduction
    r = dt * cfg.kappa / (cfg.c_v * dy * dy)
    lower = np.zeros((n_x, n_y))
    upper = np.zeros((n_x, n_y))
    diag = np.ones((n_x, n_y))
    lower[:, 1:-1] = -r
    upper[:, 1:-1] = -r
    diag[:, 1:-1] = 1.0 + 2.0 * r
    rhs = s.theta.values + dt * E_th
    dirichlet_rows(lower, diag, upper, rhs)
    th_new = thomas_solve(lower, diag, upper, rhs)

    # h: implicit resistivity; reflected ghost gives dy h = 0 at the wall
    r = dt * cfg.nu / (dy * dy)
    lower = np.zeros((n_x, n_y))
    upper = np.zeros((n_x, n_y))
    diag = np.ones((n_x, n_y))
    lower[:, 1:-1] = -r
    upper[:, 1:-1] = -r
    diag[:, 1:-1] = 1.0 + 2.0 * r
    rhs = s.h.values + dt * E_h
    diag[:, 0] = 1.0 + 2.0 * r
    upper[:, 0] = -2.0 * r
    dirichlet_rows(lower, diag, upper, rhs, wall=False, top=True)
    h_new = thomas_solve(lower, diag, upper, rhs)

    out = HomogeneousState(
        Field(grid, u_new), Field(grid, th_new), Field(grid, h_new)
    )
    if not out.is_finite():
        raise NonFiniteField(f"state lost finiteness during step at t={t:.6g}")
    return out


def time_derivatives_at_zero(
    s0: HomogeneousState,
    flow: OuterFlow,
    phi: CutoffPhi,
    cfg: SolverConfig,
    order: int,
    forcing=None,
):
    """[(u, theta, h) time-derivative triples at t=0] for orders 0..order.

    Order 1 is the unregularized RHS; order 2 is a centered finite
    difference of the RHS along a short internal explicit integration with
    step dt/16 (an approximation, adequate for corrector assembly).
    """
    if not 0 <= order <= 2:
        raise ValueError("order must be 0..2")
    base = replace(cfg, epsilon=0.0)
    out = [tuple(f.values.copy() for f in s0.fields())]
    if order >= 1:
        d1 = rhs_regularized(s0, flow, phi, base, None, 0.0, forcing)
        out.append(tuple(f.values for f in d1))
    if order >= 2:
        grid = s0.grid
        delta = cfg.dt / 16.0

        def euler(sign):
            du, dth, dh = out[1]
            return HomogeneousState(
                Field(grid, s0.u.values + sign * delta * du),
                Field(grid, s0.theta.values + sign * delta * dth),
                Field(grid, s0.h.values + sign * delta * dh),
            )

        plus = rhs_regularized(euler(+1.0), flow, phi, base, None, delta, forcing)
        minus = rhs_regularized(euler(-1.0), flow, phi, base, None, -delta, forcing)
        out.append(
            tuple(
                (p.values - m.values) / (2.0 * delta)
                for p, m in zip(plus, minus)
            )
        )
    return out


def build_correctors(
    s0: HomogeneousState,
    flow: OuterFlow,
    phi: CutoffPhi,
    cfg: SolverConfig,
    forcing=None,
) -> CorrectorSet:
    """Correctors -sum_i t^i/i! dxx dt^i(u, theta, h)(0) per the chosen order."""
    grid = s0.grid
    derivs = time_derivatives_at_zero(
        s0, flow, phi, cfg, cfg.corrector_order, forcing
    )
    d2x = []
    inv4 = []
    for du, dth, dh in derivs:
        d2x.append(
            (ddx(du, 2, grid), ddx(dth, 2, grid), ddx(dh, 2, grid))
        )
        inv4.append(inv_dy(ddx(dh, 2, grid), grid))
    return CorrectorSet(d2x=d2x, inv4=inv4)


def compatibility_residuals(
    s0: HomogeneousState,
    flow: OuterFlow,
    phi: CutoffPhi,
    cfg: SolverConfig,
    forcing=None,
) -> dict:
    """Order-0/1 compatibility: wall residuals of the data and of the t=0 RHS.

    Higher-order compatibility is out of desk scope; these two levels catch
    initial data whose wall values or instantaneous tendencies fight the
    boundary conditions.
    """
    grid = s0.grid
    out = {
        "order0_u": float(np.max(np.abs(s0.u.values[:, 0]))),
        "order0_theta": float(np.max(np.abs(s0.theta.values[:, 0]))),
        "order0_dyh": float(np.max(np.abs(ddy(s0.h.values, 1, grid)[:, 0]))),
    }
    du, dth, dh = rhs_regularized(s0, flow, phi, cfg, None, 0.0, forcing)
    out["order1_u"] = float(np.max(np.abs(du.values[:, 0])))
    out["order1_theta"] = float(np.max(np.abs(dth.values[:, 0])))
    out["order1_dyh"] = float(np.max(np.abs(ddy(dh.values, 1, grid)[:, 0])))
    return out


@dataclass
class RunResult:
    state: HomogeneousState
    history: list
    abort_reason: str | None
    floor_horizon: float
    flags: list = field(default_factory=list)

    @property
    def completed(self) -> bool:
        return self.abort_reason is None


def check_hypotheses(
    s0: HomogeneousState,
    flow: OuterFlow,
    phi: CutoffPhi,
    cfg: SolverConfig,
    tol: float = 1e-9,
):
    """Well-posedness hypothesis checks on the initial data; raises on failure."""
    grid = s0.grid
    p1 = phi.profile(grid.y, 1)
    th_tot = s0.theta.values + flow.Theta(0.0, grid.x)[:, None] * p1
    if np.min(th_tot) < -tol:
        raise HypothesisViolation(
            f"theta0 + Theta(0)phi' has min {np.min(th_tot):.3e} < 0"
        )
    # an identically-zero magnetic sector makes the floor mechanism vacuous
    # (no tangential field to bound below); the trivial run is still valid
    h_col = flow.H(0.0, grid.x)
    magnetic_active = (
        np.max(np.abs(s0.h.values)) > 0.0 or np.max(np.abs(h_col)) > 0.0
    )
    if magnetic_active:
        h_tot = s0.h.values + h_col[:, None] * p1
        if np.min(h_tot) < 2.0 * cfg.delta0 - tol:
            raise HypothesisViolation(
                f"h0 + H(0)phi' has min {np.min(h_tot):.3e} < 2*delta0 = "
                f"{2.0 * cfg.delta0}"
            )
    w = grid.weight(cfg.monitor_l + 1.0)
    bound = 1.0 / (2.0 * cfg.delta0)
    for name, f in zip(("u0", "theta0", "h0"), s0.fields()):
        d1 = ddy(f.values, 1, grid)
        d2 = ddy(f.values, 2, grid)
        for i, d in ((1, d1), (2, d2)):
            sup = np.max(np.abs(w * d))
            if sup > bound + tol:
                raise HypothesisViolation(
                    f"|<y>^(l+1) dy^{i} {name}| sup {sup:.3e} exceeds "
                    f"1/(2*delta0) = {bound:.3e}"
                )


def run(
    s0: HomogeneousState,
    flow: OuterFlow,
    phi: CutoffPhi,
    cfg: SolverConfig,
    correctors: CorrectorSet | None = None,
    forcing=None,
    enforce_hypotheses: bool = True,
) -> RunResult:
    """Advance to t_end or until an invariant monitor aborts.

    enforce_hypotheses=False is for verification drivers (MMS, contraction)
    whose data intentionally sits outside the monitored hypothesis class.
    """
    from .diagnostics import monitor_report

    if enforce_hypotheses:
        check_hypotheses(s0, flow, phi, cfg)
    if cfg.epsilon > 0.0 and correctors is None:
        correctors = build_correctors(s0, flow, phi, cfg, forcing)

    n_steps = int(round(cfg.t_end / cfg.dt))
    s = s0.copy()
    history = []
    flags: list = []
    abort = None
    floor_horizon = 0.0
    floor_armed = False  # set from the first monitor event

    def observe(t, state):
        nonlocal abort, floor_horizon
        rep = monitor_report(state, flow, phi, cfg, t)
        history.append(rep)
        if not rep.finite():
            abort = "nonfinite"
            return
        if floor_armed:
            if rep.min_h_total >= cfg.delta0:
                floor_horizon = t
            else:
                abort = "magnetic_floor"
        if rep.min_theta_total < -cfg.theta_negative_tol:
            abort = "temperature_negative"
        if rep.norm_h2l > cfg.blowup_threshold:
            abort = "norm_blowup"
        if not rep.equiv_pass:
            # equivalence is guaranteed only under the standing
            # hypothesis; distinguish hypothesis exit from a genuine anomaly
            bound = 1.0 / cfg.delta0
            hypothesis_ok = (
                rep.min_h_total >= cfg.delta0
                and rep.sup_dy1 <= bound
                and rep.sup_dy2 <= bound
            )
            kind = "anomaly" if hypothesis_ok else "hypothesis_exit"
            flags.append(f"equivalence_{kind}@t={t:.6g}")

    p1 = phi.profile(s.grid.y, 1)
    min_h0 = float(np.min(s.h.values + flow.H(0.0, s.grid.x)[:, None] * p1))
    floor_armed = min_h0 >= cfg.delta0
    observe(0.0, s)
    if abort is not None:
        return RunResult(s, history, abort, floor_horizon, flags)

    for i in range(n_steps):
        t = i * cfg.dt
        try:
            s = step(s, flow, phi, cfg, correctors, t, forcing)
        except (DegenerateViscosity, NonFiniteField) as exc:
            abort = "nonfinite" if isinstance(exc, NonFiniteField) else "degenerate_viscosity"
            break
        t_new = (i + 1) * cfg.dt
        if (i + 1) % cfg.monitor_every == 0 or i == n_steps - 1:
            observe(t_new, s)
            if abort is not None:
                break
    if abort is not None and history:
        history[-1].abort = abort
    return RunResult(s, history, abort, floor_horizon, flags)
