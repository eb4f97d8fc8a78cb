"""Solver configuration and config-file parsing.

One SolverConfig instance feeds the physical constants (mu, kappa, nu, c_v)
to both the source-term assembly and the time integrator, so the two can
never drift apart. Config files are INI-style with sections [physics],
[grid], [time], [flow], [init]; every key is validated and errors name the
offending section.key.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

from .grid import Grid
from .outer_flow import CutoffPhi, OuterFlow, make_flow


class ConfigError(ValueError):
    """Malformed or missing configuration; message names the bad key."""


@dataclass(frozen=True)
class SolverConfig:
    """Physical constants, regularization, and time-stepping controls."""

    mu: float = 1.0
    kappa: float = 1.0
    nu: float = 1.0
    c_v: float = 1.0
    epsilon: float = 0.0
    delta0: float = 0.1
    dt: float = 1e-3
    t_end: float = 0.25
    corrector_order: int = 1
    monitor_every: int = 20
    monitor_m: int = 2
    monitor_l: float = 0.0
    cfl_safety: float = 0.9
    theta_negative_tol: float = 1e-6
    blowup_threshold: float = 1e6

    def __post_init__(self):
        for name in ("mu", "kappa", "nu", "c_v"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"physics.{name} must be > 0")
        if self.epsilon < 0:
            raise ConfigError("physics.epsilon must be >= 0")
        if self.delta0 <= 0:
            raise ConfigError("physics.delta0 must be > 0")
        if self.dt <= 0:
            raise ConfigError("time.dt must be > 0")
        if self.t_end <= 0:
            raise ConfigError("time.t_end must be > 0")
        if not 0 <= self.corrector_order <= 2:
            raise ConfigError("time.corrector_order must be in 0..2")
        if self.monitor_every < 1:
            raise ConfigError("time.monitor_every must be >= 1")

    @property
    def c0(self) -> float:
        """min(mu, kappa, nu): the common parabolicity constant."""
        return min(self.mu, self.kappa, self.nu)


@dataclass
class RunSetup:
    """Everything a run needs, assembled from one config file."""

    cfg: SolverConfig
    grid: Grid
    phi: CutoffPhi
    flow: OuterFlow
    init_preset: str
    init_params: dict = field(default_factory=dict)


_PHYSICS_KEYS = ("mu", "kappa", "nu", "c_v", "epsilon", "delta0")
_REQUIRED = {
    "physics": _PHYSICS_KEYS,
    "grid": ("n_x", "n_y"),
    "time": ("dt", "t_end"),
    "flow": ("preset",),
    "init": ("preset",),
}


def _getfloat(cp, section, key, default=None):
    if not cp.has_option(section, key):
        if default is None:
            raise ConfigError(f"missing key {section}.{key}")
        return default
    try:
        return cp.getfloat(section, key)
    except ValueError as exc:
        raise ConfigError(f"bad value for {section}.{key}: {exc}") from None


def _getint(cp, section, key, default=None):
    if not cp.has_option(section, key):
        if default is None:
            raise ConfigError(f"missing key {section}.{key}")
        return default
    try:
        return cp.getint(section, key)
    except ValueError as exc:
        raise ConfigError(f"bad value for {section}.{key}: {exc}") from None


def parse_config(path) -> RunSetup:
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")

    for section, keys in _REQUIRED.items():
        if not cp.has_section(section):
            raise ConfigError(f"missing section [{section}]")
        for key in keys:
            if not cp.has_option(section, key):
                raise ConfigError(f"missing key {section}.{key}")

    try:
        cfg = SolverConfig(
            mu=_getfloat(cp, "physics", "mu"),
            kappa=_getfloat(cp, "physics", "kappa"),
            nu=_getfloat(cp, "physics", "nu"),
            c_v=_getfloat(cp, "physics", "c_v"),
            epsilon=_getfloat(cp, "physics", "epsilon"),
            delta0=_getfloat(cp, "physics", "delta0"),
            dt=_getfloat(cp, "time", "dt"),
            t_end=_getfloat(cp, "time", "t_end"),
            corrector_order=_getint(cp, "time", "corrector_order", 1),
            monitor_every=_getint(cp, "time", "monitor_every", 20),
            monitor_m=_getint(cp, "time", "monitor_m", 2),
            monitor_l=_getfloat(cp, "time", "monitor_l", 0.0),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    r0 = _getfloat(cp, "grid", "r0", 1.0)
    phi = CutoffPhi(r0=r0)
    y_max = _getfloat(cp, "grid", "y_max", 8.0 * r0)
    if y_max < 4.0 * r0:
        raise ConfigError(f"grid.y_max must be >= 4*r0 = {4.0 * r0}")
    try:
        grid = Grid(
            n_x=_getint(cp, "grid", "n_x"),
            n_y=_getint(cp, "grid", "n_y"),
            y_max=y_max,
        )
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from None

    flow_params = {
        k: (v if k == "preset" else float(v)) for k, v in cp.items("flow")
    }
    flow_name = flow_params.pop("preset")
    try:
        flow = make_flow(flow_name, **flow_params)
    except ValueError as exc:
        raise ConfigError(f"flow: {exc}") from None

    init_params = {
        k: (v if k == "preset" else float(v)) for k, v in cp.items("init")
    }
    init_name = init_params.pop("preset")

    return RunSetup(
        cfg=cfg,
        grid=grid,
        phi=phi,
        flow=flow,
        init_preset=init_name,
        init_params=init_params,
    )
