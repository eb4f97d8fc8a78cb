"""Cutoff function and prescribed outer (ideal-MHD trace) data.

CutoffPhi is the wall cutoff: identically 0 below r0, identically y above
2*r0, joined by the unique degree-7 polynomial with C3 contact at both ends.
OuterFlow bundles the four trace functions (U, Theta, H, P)(t, x) as closed
analytic families so that every tangential derivative dt^b1 dx^b2 needed by
the norms and source terms is exact, never finite-differenced.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

_HALF_PI = 0.5 * np.pi


class CutoffError(ValueError):
    pass


@dataclass(frozen=True)
class CutoffPhi:
    """Wall cutoff phi: 0 on [0, r0], y on [2*r0, inf), septic blend between.

    The blend solves the 8-condition C3 matching problem; in the scaled
    variable s = (y - r0)/r0 it is r0 * q(s) with q a quartic-through-septic
    polynomial fixed at construction.
    """

    r0: float = 1.0
    blend: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.r0 <= 0:
            raise CutoffError("r0 must be positive")
        # q(s) = sum a_p s^p, p = 4..7 with q(1)=2, q'(1)=1, q''(1)=0, q'''(1)=0
        p = np.array([4, 5, 6, 7], dtype=float)
        rows = [
            p * 0 + 1.0,
            p,
            p * (p - 1),
            p * (p - 1) * (p - 2),
        ]
        coeffs = np.linalg.solve(np.array(rows), np.array([2.0, 1.0, 0.0, 0.0]))
        object.__setattr__(self, "blend", coeffs)

    def __call__(self, y, derivative: int = 0):
        return self.eval(y, derivative)

    def eval(self, y, derivative: int = 0):
        """phi^(derivative)(y) for derivative in 0..3; exact on both plateaus."""
        if derivative not in (0, 1, 2, 3):
            raise CutoffError(f"derivative order {derivative} not supported (0..3)")
        scalar = np.isscalar(y) or np.ndim(y) == 0
        y = np.atleast_1d(np.asarray(y, dtype=float))
        out = np.zeros_like(y)
        hi = y >= 2.0 * self.r0
        if derivative == 0:
            out[hi] = y[hi]
        elif derivative == 1:
            out[hi] = 1.0
        mid = (y > self.r0) & ~hi
        if np.any(mid):
            s = (y[mid] - self.r0) / self.r0
            powers = np.array([4, 5, 6, 7], dtype=float)
            fac = np.ones(4)
            for d in range(derivative):
                fac *= powers - d
            acc = np.zeros_like(s)
            for a, pw, fc in zip(self.blend, powers, fac):
                acc += a * fc * s ** (pw - derivative)
            # d/dy = (1/r0) d/ds and phi = r0 * q(s)
            out[mid] = acc * self.r0 ** (1 - derivative)
        return float(out[0]) if scalar else out

    def profile(self, y_nodes: np.ndarray, derivative: int = 0) -> np.ndarray:
        """phi^(derivative) on a y-grid, shaped (1, n_y) for broadcasting."""
        return self.eval(y_nodes, derivative)[None, :]


@dataclass(frozen=True)
class TraceTerm:
    """One term (c0 + c1 t + c2 t^2) * amp * cos(k x - k speed t + phase).

    k = 0 collapses the oscillatory factor to amp (a pure polynomial in t).
    """

    amp: float = 0.0
    k: int = 0
    phase: float = 0.0
    speed: float = 0.0
    tpoly: tuple = (1.0, 0.0, 0.0)

    def deriv(self, b1: int, b2: int, t, x):
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        c = list(self.tpoly) + [0.0] * (3 - len(self.tpoly))

        def poly_d(i):
            if i == 0:
                return c[0] + c[1] * t + c[2] * t * t
            if i == 1:
                return c[1] + 2.0 * c[2] * t
            if i == 2:
                return 2.0 * c[2] + 0.0 * t
            return 0.0 * t

        if self.k == 0:
            if b2 > 0:
                return np.zeros(np.broadcast(t, x).shape)
            return self.amp * poly_d(b1) * np.ones_like(x)
        omega = self.k * self.speed
        theta = self.k * x - omega * t + self.phase
        out = 0.0
        for i in range(b1 + 1):
            shift = (b2 + (b1 - i)) * _HALF_PI
            out = out + (
                comb(b1, i)
                * poly_d(i)
                * (-omega) ** (b1 - i)
                * self.k**b2
                * np.cos(theta + shift)
            )
        return self.amp * out


class TraceFunction:
    """Sum of TraceTerms; exposes exact tangential derivatives."""

    def __init__(self, terms=()):
        self.terms = tuple(terms)

    def __call__(self, t, x, b1: int = 0, b2: int = 0):
        x = np.asarray(x, dtype=float)
        out = np.zeros(np.broadcast(np.asarray(t, float), x).shape)
        for term in self.terms:
            out = out + term.deriv(b1, b2, t, x)
        return out

    @classmethod
    def constant(cls, value):
        return cls([TraceTerm(amp=value)] if value != 0.0 else [])


@dataclass
class OuterFlow:
    """Trace data (U, Theta, H, P) with exact tangential derivatives."""

    U: TraceFunction
    Theta: TraceFunction
    H: TraceFunction
    P: TraceFunction
    name: str = "custom"

    def check_theta_nonnegative(self, t_samples, x_samples, tol: float = 1e-12) -> bool:
        for t in t_samples:
            if np.min(self.Theta(t, x_samples)) < -tol:
                return False
        return True

    def sup_uth(self, t, n_samples: int = 256) -> float:
        """||(U, Theta, H)(t)||_inf over the torus, for M(t)."""
        x = np.linspace(0.0, 2.0 * np.pi, n_samples, endpoint=False)
        return float(
            max(np.max(np.abs(f(t, x))) for f in (self.U, self.Theta, self.H))
        )


def matching_residuals(flow: OuterFlow, t: float, x_samples):
    """Residuals of the ideal-MHD trace relations at height infinity.

    Returns (R1, R2, R3) sampled on x_samples:
      R1 = U_t + U U_x + P_x - H H_x
      R2 = Theta_t + U Theta_x
      R3 = H_t + U H_x - H U_x
    """
    x = np.asarray(x_samples, dtype=float)
    U, Th, H, P = flow.U, flow.Theta, flow.H, flow.P
    r1 = U(t, x, 1, 0) + U(t, x) * U(t, x, 0, 1) + P(t, x, 0, 1) - H(t, x) * H(t, x, 0, 1)
    r2 = Th(t, x, 1, 0) + U(t, x) * Th(t, x, 0, 1)
    r3 = H(t, x, 1, 0) + U(t, x) * H(t, x, 0, 1) - H(t, x) * U(t, x, 0, 1)
    return r1, r2, r3


def m0_estimate(flow: OuterFlow, t_samples, max_order: int = 3, n_x: int = 256) -> float:
    """Truncated outer-flow size: a lower bound of the untruncated constant.

    sum_{i<=max_order} sup_t || dt^i (U, Theta, H, P)(t) ||_{H^{max_order-i}(T_x)}
    with the x-Sobolev norm evaluated by periodic rectangle quadrature.
    """
    x = np.linspace(0.0, 2.0 * np.pi, n_x, endpoint=False)
    dx = 2.0 * np.pi / n_x
    total = 0.0
    for i in range(max_order + 1):
        sup = 0.0
        for t in t_samples:
            sq = 0.0
            for f in (flow.U, flow.Theta, flow.H, flow.P):
                for j in range(max_order - i + 1):
                    vals = f(t, x, i, j)
                    sq += dx * float(np.sum(vals**2))
            sup = max(sup, np.sqrt(sq))
        total += sup
    return float(total)


def make_flow(name: str, **params) -> OuterFlow:
    """Named analytic flow presets (see README for the parameter table)."""
    name = name.lower()
    if name == "zero":
        return OuterFlow(*(TraceFunction() for _ in range(4)), name=name)

    if name == "constants":
        u0 = params.get("u0", 0.0)
        theta0 = params.get("theta0", 0.0)
        h0 = params.get("h0", 0.0)
        p0 = params.get("p0", 0.0)
        if theta0 < 0:
            raise ValueError("theta0 must be >= 0")
        return OuterFlow(
            TraceFunction.constant(u0),
            TraceFunction.constant(theta0),
            TraceFunction.constant(h0),
            TraceFunction.constant(p0),
            name=name,
        )

    if name == "uh_pair":
        # steady U = H: the symmetric pair satisfies all matching conditions
        amp = params.get("amp", 0.5)
        k = int(params.get("k", 1))
        offset = params.get("offset", 0.0)
        theta0 = params.get("theta0", 0.0)
        terms = [TraceTerm(amp=amp, k=k, phase=-_HALF_PI)]  # amp*sin(kx)
        if offset:
            terms.append(TraceTerm(amp=offset))
        uh = TraceFunction(terms)
        return OuterFlow(
            uh, TraceFunction.constant(theta0), uh,
            TraceFunction.constant(params.get("p0", 0.0)), name=name,
        )

    if name == "traveling_wave":
        # constant U advecting H and Theta profiles; P = H^2/2 closes R1
        c = params.get("speed", 0.5)
        amp = params.get("amp", 0.3)
        k = int(params.get("k", 1))
        h0 = params.get("h0", 0.5)
        tamp = params.get("theta_amp", 0.0)
        U = TraceFunction.constant(c)
        H = TraceFunction(
            [TraceTerm(amp=amp, k=k, phase=-_HALF_PI, speed=c), TraceTerm(amp=h0)]
        )
        Theta = TraceFunction(
            [TraceTerm(amp=tamp, k=k, speed=c), TraceTerm(amp=tamp)]
            if tamp
            else []
        )
        # H^2/2 = amp^2/4 + h0^2/2 + amp*h0*sin(k xi) - amp^2/4 cos(2k xi)
        P = TraceFunction(
            [
                TraceTerm(amp=amp * amp / 4.0 + h0 * h0 / 2.0),
                TraceTerm(amp=amp * h0, k=k, phase=-_HALF_PI, speed=c),
                TraceTerm(amp=-amp * amp / 4.0, k=2 * k, speed=c),
            ]
        )
        return OuterFlow(U, Theta, H, P, name=name)

    if name == "decaying_h":
        # constant-in-x outer field shrinking linearly in time; crosses any
        # floor level at a known instant (breach preset for abort tests)
        h0 = params.get("h0", 0.5)
        rate = params.get("rate", -2.0)
        return OuterFlow(
            TraceFunction.constant(params.get("u0", 0.0)),
            TraceFunction.constant(params.get("theta0", 0.0)),
            TraceFunction([TraceTerm(amp=h0, tpoly=(1.0, rate, 0.0))]),
            TraceFunction.constant(params.get("p0", 0.0)),
            name=name,
        )

    if name == "single_mode":
        amp = params.get("amp", 1.0)
        k = int(params.get("k", 1))
        return OuterFlow(
            TraceFunction([TraceTerm(amp=amp, k=k, phase=-_HALF_PI)]),
            TraceFunction.constant(params.get("theta0", 0.0)),
            TraceFunction.constant(params.get("h0", 0.0)),
            TraceFunction.constant(params.get("p0", 0.0)),
            name=name,
        )

    if name == "random":
        rng = np.random.default_rng(int(params.get("seed", 0)))
        scale = params.get("scale", 0.5)

        def rand_fn(nonneg=False):
            k = int(rng.integers(1, 4))
            amp = scale * rng.uniform(0.2, 1.0)
            phase = rng.uniform(0.0, 2.0 * np.pi)
            speed = rng.uniform(-1.0, 1.0)
            tpoly = (1.0, rng.uniform(-0.5, 0.5), rng.uniform(-0.25, 0.25))
            terms = [TraceTerm(amp=amp, k=k, phase=phase, speed=speed, tpoly=tpoly)]
            if nonneg:
                # bound |poly| on desk horizons: |c1|<=.5,|c2|<=.25 over t<=1
                terms.append(TraceTerm(amp=2.0 * amp))
            else:
                terms.append(TraceTerm(amp=scale * rng.uniform(-0.5, 0.5)))
            return TraceFunction(terms)

        return OuterFlow(rand_fn(), rand_fn(nonneg=True), rand_fn(), rand_fn(), name=name)

    raise ValueError(f"unknown flow preset '{name}'")
