"""Picard iteration over linear transport problems with a frozen advecting field.

Starting from ``u^(0) = 0``, iterate ``n + 1`` solves

    u_t + (1 + u^(n)) u_x = d_x P(D) f1(u^(n)) + P(D) f2(u^(n), u^(n)_x),
    u(0) = S_{n+1} u0,

on a shared uniform time grid.  The frozen field and the source are sampled
on that grid and interpolated linearly in time inside the RK4 stages.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import logging
import math

import numpy as np

from .bony import commutator_bound_audit, product_bound_audit
from .littlewood_paley import BesovSpec, besov_norm, besov_norm_many, critical_index, low_cutoff
from .model import FchParams, Form, f1, f2
from .spectral import (
    GridSpec, SpectralField, derivative, p_operator, pointwise_product,
)

__all__ = [
    "FieldTrajectory",
    "LifespanEstimate",
    "lifespan",
    "audited_constant",
    "transport_solve",
    "source_trajectory",
    "picard_step",
    "IterationTrace",
    "IterationFailure",
    "picard_run",
    "BoundReport",
    "bound_check",
]

log = logging.getLogger(__name__)


class IterationFailure(RuntimeError):
    pass


@dataclass
class FieldTrajectory:
    """Fields sampled at ``times``; row ``i`` of ``coeffs`` is the field at ``times[i]``."""

    grid: GridSpec
    times: np.ndarray
    coeffs: np.ndarray

    @classmethod
    def constant(cls, u: SpectralField, times) -> "FieldTrajectory":
        times = np.asarray(times, dtype=float)
        return cls(u.grid, times, np.tile(u.coefficients, (times.size, 1)))

    @classmethod
    def zeros(cls, grid: GridSpec, times) -> "FieldTrajectory":
        times = np.asarray(times, dtype=float)
        return cls(grid, times, np.zeros((times.size, grid.N // 2 + 1), dtype=complex))

    @classmethod
    def from_fields(cls, fields, times) -> "FieldTrajectory":
        fields = list(fields)
        return cls(fields[0].grid, np.asarray(times, dtype=float),
                   np.array([f.coefficients for f in fields]))

    def __len__(self):
        return self.times.size

    def field(self, i: int) -> SpectralField:
        return SpectralField(self.grid, coeffs=self.coeffs[i])

    def __add__(self, other: "FieldTrajectory") -> "FieldTrajectory":
        return FieldTrajectory(self.grid, self.times, self.coeffs + other.coeffs)

    def __sub__(self, other: "FieldTrajectory") -> "FieldTrajectory":
        return FieldTrajectory(self.grid, self.times, self.coeffs - other.coeffs)

    def norms(self, spec: BesovSpec) -> np.ndarray:
        return besov_norm_many(self.coeffs, self.grid, spec)


# --------------------------------------------------------------------------
# lifespan

@dataclass(frozen=True)
class LifespanEstimate:
    C_hat: float
    T: float
    u0_norm: float

    @property
    def branches(self) -> tuple[float, float]:
        """``(1/C, 1/(8 C ||u0||))``; the second is ``inf`` for zero data."""
        second = math.inf if self.u0_norm == 0 else 1.0 / (8 * self.C_hat * self.u0_norm)
        return 1.0 / self.C_hat, second


def lifespan(u0: SpectralField | float, C_hat: float, nu: float) -> LifespanEstimate:
    """``T = min(1/C, 1/(8 C ||u0||_{B^{s0}_{2,1}}))``.

    ``u0`` may be a field or an already computed norm.
    """
    if not C_hat > 0:
        raise ValueError(f"C_hat must be positive, got {C_hat}")
    if isinstance(u0, SpectralField):
        norm = besov_norm(u0, BesovSpec(critical_index(nu).s0, 2, 1))
    else:
        norm = float(u0)
    est = LifespanEstimate(float(C_hat), 0.0, norm)
    return LifespanEstimate(est.C_hat, min(est.branches), norm)


def audited_constant(grid: GridSpec, nu: float, ensemble_size: int = 32, seed: int = 0) -> float:
    """Empirical constant: max of the commutator and product audit maxima."""
    comm = commutator_bound_audit(ensemble_size, grid, nu, seed)
    prod = product_bound_audit(ensemble_size, grid, nu, seed)
    return max(comm.empirical_C, max(prod.max.values()))


# --------------------------------------------------------------------------
# linear transport

def _transport_rate(f_c: np.ndarray, v_c: np.ndarray, r_c: np.ndarray,
                    grid: GridSpec) -> np.ndarray:
    # -(1 + v) f_x + r, with a dealiased product
    fx = derivative(SpectralField(grid, coeffs=f_c))
    vfx = pointwise_product(SpectralField(grid, coeffs=v_c), fx)
    return r_c - fx.coefficients - vfx.coefficients


def transport_solve(v: FieldTrajectory, rhs: FieldTrajectory, f0: SpectralField,
                    dt_sub: float | None = None) -> FieldTrajectory:
    """Solve ``f_t + (1 + v) f_x = rhs`` with ``f(0) = f0`` by RK4.

    ``v`` and ``rhs`` share a time grid and are interpolated linearly in time.
    Each grid interval is split into ``ceil(interval / dt_sub)`` equal RK4
    substeps (one substep when ``dt_sub`` is omitted).  The solution is
    returned on the same time grid.
    """
    times = v.times
    if rhs.times.shape != times.shape or not np.allclose(rhs.times, times):
        raise ValueError("v and rhs must share a time grid")
    grid = f0.grid
    out = np.empty_like(v.coeffs)
    f = f0.coefficients.copy()
    out[0] = f
    for i in range(times.size - 1):
        span = times[i + 1] - times[i]
        m = 1 if dt_sub is None else max(1, int(math.ceil(span / dt_sub - 1e-9)))
        h = span / m
        va, vb = v.coeffs[i], v.coeffs[i + 1]
        ra, rb = rhs.coeffs[i], rhs.coeffs[i + 1]

        def at(theta):
            return va + theta * (vb - va), ra + theta * (rb - ra)

        for j in range(m):
            th0 = j / m
            th_half = (j + 0.5) / m
            th1 = (j + 1) / m
            v0, r0 = at(th0)
            vh, rh = at(th_half)
            v1, r1 = at(th1)
            k1 = _transport_rate(f, v0, r0, grid)
            k2 = _transport_rate(f + 0.5 * h * k1, vh, rh, grid)
            k3 = _transport_rate(f + 0.5 * h * k2, vh, rh, grid)
            k4 = _transport_rate(f + h * k3, v1, r1, grid)
            f = f + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(f)):
            raise IterationFailure(f"non-finite transport solution at t={times[i + 1]:.6g}")
        out[i + 1] = f
    return FieldTrajectory(grid, times.copy(), out)


def source_trajectory(u: FieldTrajectory, nu: float) -> FieldTrajectory:
    """``d_x P(D) f1(u) + P(D) f2(u, u_x)`` at every time of ``u``."""
    rows = []
    for i in range(len(u)):
        ui = u.field(i)
        src = derivative(p_operator(f1(ui), nu)) + p_operator(f2(ui, derivative(ui), nu), nu)
        rows.append(src.coefficients)
    return FieldTrajectory(u.grid, u.times, np.array(rows))


def picard_step(u_n: FieldTrajectory, f0: SpectralField, nu: float,
                dt_sub: float | None = None) -> FieldTrajectory:
    """One iteration: transport with speed ``1 + u_n`` and source built from ``u_n``."""
    return transport_solve(u_n, source_trajectory(u_n, nu), f0, dt_sub)


# --------------------------------------------------------------------------
# the iteration and its diagnostics

@dataclass
class IterationTrace:
    """Iterates ``u^(0..n_max)`` on ``time_grid`` with difference diagnostics.

    ``w_n1[n, i]`` is ``||u^(n+1) - u^(n)||_{B^{s0-1}_{2,inf}}`` at ``time_grid[i]``;
    ``w_nn[n]`` the same for ``u^(2n) - u^(n)``.  ``norms[n, i]`` is
    ``||u^(n)||_{B^{s0}_{2,1}}`` and ``bound_margin`` (when a constant was
    supplied) the slack in the induction bound.
    """

    time_grid: np.ndarray
    iterates: list[FieldTrajectory]
    nu: float
    w_n1: np.ndarray
    w_nn: dict[int, np.ndarray]
    norms: np.ndarray
    u0_norm: float
    C_hat: float | None = None
    bound_margin: np.ndarray | None = None

    @property
    def n_max(self) -> int:
        return len(self.iterates) - 1

    def sup_w_n1(self) -> np.ndarray:
        return self.w_n1.max(axis=1)

    def decay_ratios(self) -> np.ndarray:
        """``sup_t w_{n,1} / sup_t w_{n-1,1}`` for ``n = 1 .. n_max-1``."""
        s = self.sup_w_n1()
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(s[:-1] > 0, s[1:] / s[:-1], 0.0)

    def iterate_at(self, n: int, t: float) -> SpectralField:
        """Iterate ``n`` at time ``t`` (linear interpolation between grid times)."""
        tr = self.iterates[n]
        i = int(np.clip(np.searchsorted(self.time_grid, t) - 1, 0, len(tr) - 2))
        t0, t1 = self.time_grid[i], self.time_grid[i + 1]
        th = (t - t0) / (t1 - t0)
        return SpectralField(tr.grid, coeffs=(1 - th) * tr.coeffs[i] + th * tr.coeffs[i + 1])


def _bound(u0_norm: float, C_hat: float, t: np.ndarray) -> np.ndarray:
    return 2.0 * u0_norm / (1.0 - 4.0 * C_hat * u0_norm * t)


def picard_run(u0: SpectralField, n_max: int, T: float, params: FchParams,
               time_steps: int, C_hat: float | None = None,
               dt_sub: float | None = None) -> IterationTrace:
    """Run ``n_max`` Picard iterations on ``[0, T]`` with ``time_steps`` intervals.

    Only the ``simplified_32`` coefficient form is iterated.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if params.form is not Form.SIMPLIFIED_32:
        raise ValueError("the iteration is defined for form simplified_32")
    if not T > 0 or time_steps < 1:
        raise ValueError("need T > 0 and time_steps >= 1")
    nu = params.nu
    grid = u0.grid
    s0 = critical_index(nu).s0
    times = np.linspace(0.0, T, time_steps + 1)
    iterates = [FieldTrajectory.zeros(grid, times)]
    for n in range(n_max):
        f0 = low_cutoff(u0, n + 1)
        nxt = picard_step(iterates[-1], f0, nu, dt_sub)
        if not np.all(np.isfinite(nxt.coeffs)):
            raise IterationFailure(f"iterate {n + 1} left the finite range")
        iterates.append(nxt)
        log.debug("picard iterate %d done", n + 1)

    spec_w = BesovSpec(s0 - 1, 2, np.inf)
    w_n1 = np.array([(iterates[n + 1] - iterates[n]).norms(spec_w) for n in range(n_max)])
    w_nn = {n: (iterates[2 * n] - iterates[n]).norms(spec_w)
            for n in range(1, n_max // 2 + 1)}
    norms = np.array([it.norms(BesovSpec(s0, 2, 1)) for it in iterates])
    u0_norm = besov_norm(u0, BesovSpec(s0, 2, 1))
    margin = None
    if C_hat is not None:
        margin = _bound(u0_norm, C_hat, times)[None, :] - norms
    return IterationTrace(times, iterates, nu, w_n1, w_nn, norms, u0_norm, C_hat, margin)


@dataclass
class BoundReport:
    bound: np.ndarray
    norms: np.ndarray
    margin: np.ndarray
    violations: list[tuple[int, float, float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def bound_check(trace: IterationTrace, C_hat: float, u0_norm: float) -> BoundReport:
    """Check ``||u^(n)(t)||_{B^{s0}_{2,1}} <= 2||u0|| / (1 - 4 C ||u0|| t)`` everywhere.

    Violations are listed as ``(n, t, margin)``.
    """
    T = trace.time_grid[-1]
    if 4.0 * C_hat * u0_norm * T >= 1.0:
        raise ValueError("T is at or past the singularity of the bound")
    bound = _bound(u0_norm, C_hat, trace.time_grid)
    margin = bound[None, :] - trace.norms
    bad = np.argwhere(margin < 0)
    violations = [(int(n), float(trace.time_grid[i]), float(margin[n, i])) for n, i in bad]
    return BoundReport(bound, trace.norms, margin, violations)
