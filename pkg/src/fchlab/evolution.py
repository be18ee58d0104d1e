"""Explicit time integration of the fCH equation with norm monitoring."""
from __future__ import annotations

from dataclasses import dataclass, field
import logging

import numpy as np

from .littlewood_paley import BesovSpec, besov_norm, critical_index
from .model import FchParams, Form, rhs
from .spectral import SpectralField, dealias, derivative

__all__ = [
    "SolverConfig",
    "TrajectoryRecord",
    "BlowUpError",
    "ProbeInvalid",
    "step_rk4",
    "integrate",
    "continuous_dependence_probe",
    "monitor_norms",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    """Step control for :func:`integrate`.

    The step actually taken is ``min(dt, cfl_safety * dx / (1 + ||u||_inf))``,
    shortened at the end so that ``t_end`` is hit exactly.
    """

    dt: float
    t_end: float
    cfl_safety: float = 0.9
    monitor_stride: int = 10
    blowup_threshold: float = 1e6

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end > 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if not (0 < self.cfl_safety <= 1):
            raise ValueError(f"cfl_safety must lie in (0, 1], got {self.cfl_safety}")
        if self.monitor_stride < 1:
            raise ValueError("monitor_stride must be >= 1")
        if not self.blowup_threshold > 0:
            raise ValueError("blowup_threshold must be positive")


NORM_NAMES = ("besov_s0", "l2", "linf_ux", "mass")


def monitor_norms(u: SpectralField, nu: float) -> dict[str, float]:
    s0 = critical_index(nu).s0
    return {
        "besov_s0": besov_norm(u, BesovSpec(s0, 2, 1)),
        "l2": u.l2_norm(),
        "linf_ux": derivative(u).linf_norm(),
        "mass": u.integral(),
    }


@dataclass
class TrajectoryRecord:
    times: list[float] = field(default_factory=list)
    snapshots: list[SpectralField] = field(default_factory=list)
    norms: list[dict[str, float]] = field(default_factory=list)
    steps: int = 0

    def append(self, t: float, u: SpectralField, nu: float):
        self.times.append(float(t))
        self.snapshots.append(u)
        self.norms.append(monitor_norms(u, nu))

    def norm_series(self, name: str) -> np.ndarray:
        return np.array([n[name] for n in self.norms])

    @property
    def final(self) -> SpectralField:
        return self.snapshots[-1]


class BlowUpError(RuntimeError):
    """Raised when a run produces non-finite values or crosses the threshold.

    ``t`` and ``field`` hold the last valid state; ``record`` the partial
    trajectory.
    """

    def __init__(self, message: str, t: float, field: SpectralField,
                 record: TrajectoryRecord | None = None, step: int | None = None):
        super().__init__(message)
        self.t = t
        self.field = field
        self.record = record
        self.step = step


class ProbeInvalid(RuntimeError):
    pass


def step_rk4(u: SpectralField, dt: float, params: FchParams) -> SpectralField:
    """One classical RK4 step of the dealiased semidiscretization."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    k1 = rhs(u, params)
    k2 = rhs(u + (0.5 * dt) * k1, params)
    k3 = rhs(u + (0.5 * dt) * k2, params)
    k4 = rhs(u + dt * k3, params)
    out = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    for k in (k1, k2, k3, k4, out):
        if not k.is_finite():
            raise BlowUpError("non-finite value in RK4 stage", 0.0, u)
    return out


def integrate(u0: SpectralField, config: SolverConfig, params: FchParams) -> TrajectoryRecord:
    """Advance ``u0`` to ``config.t_end`` recording norms every ``monitor_stride`` steps.

    Raises :class:`BlowUpError` carrying the last valid time and field when a
    stage turns non-finite or ``||u_x||_inf`` exceeds the threshold.
    """
    u = dealias(u0)
    grid = u.grid
    record = TrajectoryRecord()
    record.append(0.0, u, params.nu)
    t = 0.0
    n = 0
    eps = 1e-12 * config.t_end
    while t < config.t_end - eps:
        cfl = config.cfl_safety * grid.dx / (1.0 + u.linf_norm())
        dt = min(config.dt, cfl, config.t_end - t)
        try:
            unew = step_rk4(u, dt, params)
        except BlowUpError as exc:
            raise BlowUpError(f"non-finite state after t={t:.6g}", t, u, record, n) from exc
        n += 1
        t = config.t_end if config.t_end - (t + dt) <= eps else t + dt
        ux_inf = derivative(unew).linf_norm()
        if ux_inf > config.blowup_threshold:
            record.append(t, unew, params.nu)
            record.steps = n
            raise BlowUpError(
                f"||u_x||_inf = {ux_inf:.6g} exceeds {config.blowup_threshold:g} at t={t:.6g}",
                t, unew, record, n)
        u = unew
        if n % config.monitor_stride == 0 or t >= config.t_end - eps:
            record.append(t, u, params.nu)
    record.steps = n
    return record


def continuous_dependence_probe(u0: SpectralField, delta: float, direction: SpectralField,
                                config: SolverConfig, params: FchParams) -> float:
    """``sup_t ||u_delta(t) - u(t)||_{B^{s0-1}_{2,inf}} / |delta|`` over monitor times.

    ``direction`` is normalized to unit :math:`B^{s_0-1}_{2,1}` norm.
    ``delta = 0`` returns 0.
    """
    if delta == 0:
        return 0.0
    s0 = critical_index(params.nu).s0
    dn = besov_norm(direction, BesovSpec(s0 - 1, 2, 1))
    if dn == 0:
        raise ValueError("direction must be nonzero")
    direction = direction / dn
    try:
        base = integrate(u0, config, params)
        pert = integrate(u0 + delta * direction, config, params)
    except BlowUpError as exc:
        raise ProbeInvalid(str(exc)) from exc
    spec = BesovSpec(s0 - 1, 2, np.inf)
    return max(besov_norm(a - b, spec)
               for a, b in zip(base.snapshots, pert.snapshots)) / abs(delta)
