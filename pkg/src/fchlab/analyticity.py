"""Numerical signatures of analyticity: Fourier decay fits and truncated E_s norms."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .evolution import TrajectoryRecord
from .littlewood_paley import es_norm_truncated
from .spectral import SpectralField, pointwise_product

__all__ = [
    "DecayFit",
    "NoFit",
    "fourier_decay_fit",
    "is_analytic_grade",
    "EsRow",
    "es_trajectory",
    "algebra_probe",
]

MIN_MODES = 8
MAX_RESIDUAL = 0.1


class NoFit(ValueError):
    """Raised when a field has too few modes above the floor to fit a decay rate."""


@dataclass(frozen=True)
class DecayFit:
    """Fit of ``log|c_m| ~ log A - sigma |k_m|`` over positive modes above the floor.

    ``residual`` is the RMS misfit of ``log|c|`` divided by the range of
    ``log|c|`` over the window, so it is dimensionless and scale free.
    ``sigma`` is ``None`` unless the fit is trustworthy
    (``residual < 0.1`` and at least 8 modes).
    """

    A: float
    sigma_raw: float
    fit_window: tuple[float, float]
    residual: float
    modes: int

    @property
    def ok(self) -> bool:
        return self.residual < MAX_RESIDUAL and self.modes >= MIN_MODES

    @property
    def sigma(self) -> float | None:
        return self.sigma_raw if self.ok else None


def fourier_decay_fit(u: SpectralField, floor: float | None = None) -> DecayFit:
    """Least-squares exponential decay fit of the Fourier coefficients of ``u``.

    ``floor`` is absolute; by default ``1e-13 * max|c|``.  Raises
    :class:`NoFit` when fewer than 8 positive modes lie above the floor.
    """
    c = np.abs(u.coefficients[1:-1])
    k = u.grid.rk[1:-1]
    top = float(np.max(np.abs(u.coefficients))) if u.coefficients.size else 0.0
    if floor is None:
        floor = 1e-13 * top
    sel = c > floor
    n = int(np.count_nonzero(sel))
    if n < MIN_MODES or top == 0.0:
        raise NoFit(f"only {n} modes above floor {floor:.3g}")
    ks, ys = k[sel], np.log(c[sel])
    slope, icpt = np.polyfit(ks, ys, 1)
    misfit = ys - (icpt + slope * ks)
    span = float(ys.max() - ys.min())
    rms = float(np.sqrt(np.mean(misfit**2)))
    residual = rms / span if span > 0 else (0.0 if rms == 0 else np.inf)
    return DecayFit(float(np.exp(icpt)), float(-slope), (float(ks[0]), float(ks[-1])),
                    residual, n)


def is_analytic_grade(u: SpectralField) -> bool:
    """True for nonzero trigonometric polynomials and fields with a good decay fit."""
    if not np.any(u.coefficients != 0):
        return False
    try:
        fit = fourier_decay_fit(u)
    except NoFit:
        # fewer than 8 active modes: a trigonometric polynomial, hence entire
        return True
    return fit.ok and fit.sigma_raw > 0


@dataclass(frozen=True)
class EsRow:
    t: float
    s: float
    value: float
    argmax_k: int
    converged: bool


def es_trajectory(record: TrajectoryRecord, s: float, kmax: int = 24,
                  nu: float = 1.5) -> list[EsRow]:
    """Truncated ``|||u(t)|||_s`` at every recorded snapshot."""
    rows = []
    for t, u in zip(record.times, record.snapshots):
        r = es_norm_truncated(u, s, kmax, nu)
        rows.append(EsRow(t, s, r.value, r.argmax_k, r.converged))
    return rows


def algebra_probe(u: SpectralField, v: SpectralField, s: float, kmax: int = 24,
                  nu: float = 1.5) -> float:
    """``|||uv|||_s / (|||u|||_s |||v|||_s)`` with truncated norms."""
    for name, w in (("u", u), ("v", v)):
        if not is_analytic_grade(w):
            raise NoFit(f"{name} is not analytic-grade")
    num = es_norm_truncated(pointwise_product(u, v), s, kmax, nu).value
    return num / (es_norm_truncated(u, s, kmax, nu).value
                  * es_norm_truncated(v, s, kmax, nu).value)
