"""Bony paraproducts, remainders and the fractional commutator.

For fields ``u, v`` on one grid::

    T_u v   = sum_j S_{j-1} u  Delta_j v
    R(u, v) = sum_{|k-j|<=1} Delta_k u  Delta_j v
    T'_v u  = sum_j S_{j+2} v  Delta_j u

so that ``uv = T_u v + T_v u + R(u, v) = T_u v + T'_v u``.  All products are
dealiased, which keeps these identities exact up to round-off.

The commutator ``[f, L] g = f L g - L(f g)`` with ``L = (-d_xx)^nu`` splits as
``F + G`` with ``F = [T_f, L] g + T_{L g} f - L T'_g f`` and
``G = R(f, L g)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .littlewood_paley import (
    _block_table, _low_cutoff_symbol, besov_norm, BesovSpec, critical_index, qmax,
)
from .spectral import (
    GridSpec, SpectralField, apply_multiplier, derivative, fractional_laplacian,
    p_operator, pointwise_product, random_field,
)

__all__ = [
    "BonyParts",
    "CommutatorSplit",
    "paraproduct",
    "paraproduct_prime",
    "remainder",
    "bony_parts",
    "commutator",
    "commutator_split",
    "AuditReport",
    "commutator_bound_audit",
    "product_bound_audit",
    "audit_ratios",
]


def _blocks(u: SpectralField) -> list[SpectralField]:
    return [apply_multiplier(u, row) for row in _block_table(u.grid)]


def _cutoffs(u: SpectralField, shift: int) -> list[SpectralField]:
    # S_{j+shift} u for j = -1 .. qmax
    return [apply_multiplier(u, _low_cutoff_symbol(u.grid, j + shift))
            for j in range(-1, qmax(u.grid) + 1)]


def _sum(fields, grid: GridSpec) -> SpectralField:
    total = np.zeros(grid.N // 2 + 1, dtype=complex)
    for f in fields:
        total = total + f.coefficients
    return SpectralField(grid, coeffs=total)


def _check_grid(u: SpectralField, v: SpectralField):
    if u.grid != v.grid:
        raise ValueError("fields live on different grids")


def paraproduct(u: SpectralField, v: SpectralField) -> SpectralField:
    """Paraproduct ``T_u v = sum_j S_{j-1}u Delta_j v``."""
    _check_grid(u, v)
    low = _cutoffs(u, -1)
    terms = [pointwise_product(lo, dv)
             for j, (lo, dv) in enumerate(zip(low, _blocks(v)), start=-1) if j >= 1]
    return _sum(terms, u.grid)


def paraproduct_prime(v: SpectralField, u: SpectralField) -> SpectralField:
    """Modified paraproduct ``T'_v u = sum_j S_{j+2}v Delta_j u``."""
    _check_grid(u, v)
    low = _cutoffs(v, 2)
    return _sum([pointwise_product(lo, du) for lo, du in zip(low, _blocks(u))], u.grid)


def remainder(u: SpectralField, v: SpectralField) -> SpectralField:
    """Remainder ``R(u, v) = sum_{|k-j|<=1} Delta_k u Delta_j v``."""
    _check_grid(u, v)
    bu, bv = _blocks(u), _blocks(v)
    n = len(bu)
    terms = []
    for j in range(n):
        near = sum(bv[i].coefficients for i in range(max(0, j - 1), min(n, j + 2)))
        terms.append(pointwise_product(bu[j], SpectralField(u.grid, coeffs=near)))
    return _sum(terms, u.grid)


@dataclass(frozen=True)
class BonyParts:
    Tuv: SpectralField
    Tvu: SpectralField
    Ruv: SpectralField
    Tprime_vu: SpectralField

    def total(self) -> SpectralField:
        return self.Tuv + self.Tvu + self.Ruv


def bony_parts(u: SpectralField, v: SpectralField) -> BonyParts:
    return BonyParts(paraproduct(u, v), paraproduct(v, u), remainder(u, v),
                     paraproduct_prime(v, u))


def commutator(f: SpectralField, g: SpectralField, nu: float) -> SpectralField:
    """``[f, (-d_xx)^nu] g = f (-d_xx)^nu g - (-d_xx)^nu (f g)``.

    The mean of ``f`` commutes with the multiplier and is dropped first, so
    constants give an exactly zero commutator.
    """
    _check_grid(f, g)
    f = f - f.mean()
    return (pointwise_product(f, fractional_laplacian(g, nu))
            - fractional_laplacian(pointwise_product(f, g), nu))


@dataclass(frozen=True)
class CommutatorSplit:
    F: SpectralField
    G: SpectralField
    total: SpectralField


def commutator_split(f: SpectralField, g: SpectralField, nu: float) -> CommutatorSplit:
    """Paraproduct splitting of the commutator into ``F + G``.

    As in :func:`commutator` the mean of ``f`` is removed first; it commutes
    with the multiplier, so ``F`` and ``G`` vanish for constant ``f``.
    """
    _check_grid(f, g)
    f = f - f.mean()
    lg = fractional_laplacian(g, nu)
    F = (paraproduct(f, lg) - fractional_laplacian(paraproduct(f, g), nu)
         + paraproduct(lg, f) - fractional_laplacian(paraproduct_prime(g, f), nu))
    G = remainder(f, lg)
    return CommutatorSplit(F, G, commutator(f, g, nu))


# --------------------------------------------------------------------------
# empirical audits of the commutator and product estimates

def audit_ratios(f: SpectralField, g: SpectralField, nu: float) -> tuple[float, float, float]:
    """Left/right ratios of the three commutator estimates for one pair.

    e1: ``||[f,L]g||_{B^{s0-2nu}_{2,1}} / (||f||_{B^{s0}_{2,1}} ||g||_{B^{s0-1}_{2,1}})``
    e2: ``||[f,L]g||_{B^{s0-1-2nu}_{2,inf}} / (||f||_{B^{s0-1}_{2,1}} ||g||_{B^{s0-1}_{2,1}})``
    e3: ``||[f,L]g||_{B^{s0-1-2nu}_{2,inf}} / (||f||_{B^{s0}_{2,1}} ||g||_{B^{s0-2}_{2,1}})``
    """
    s0 = critical_index(nu).s0
    c = commutator(f, g, nu)
    b = lambda u, s, r=1: besov_norm(u, BesovSpec(s, 2, r))  # noqa: E731

    def ratio(num, den):
        return 0.0 if num == 0.0 else num / den

    lhs1 = b(c, s0 - 2 * nu)
    lhs23 = b(c, s0 - 1 - 2 * nu, np.inf)
    e1 = ratio(lhs1, b(f, s0) * b(g, s0 - 1))
    e2 = ratio(lhs23, b(f, s0 - 1) * b(g, s0 - 1))
    e3 = ratio(lhs23, b(f, s0) * b(g, s0 - 2))
    return e1, e2, e3


@dataclass
class AuditReport:
    """Per-sample ratios plus their maxima and means."""

    nu: float
    N: int
    seed: int
    ratios: np.ndarray                       # shape (samples, estimates)
    names: tuple[str, ...] = ("e1", "e2", "e3")
    max: dict = field(default_factory=dict)
    mean: dict = field(default_factory=dict)

    def __post_init__(self):
        r = np.asarray(self.ratios, dtype=float).reshape(-1, len(self.names))
        self.ratios = r
        self.max = {n: float(r[:, i].max()) if len(r) else 0.0
                    for i, n in enumerate(self.names)}
        self.mean = {n: float(r[:, i].mean()) if len(r) else 0.0
                     for i, n in enumerate(self.names)}

    @property
    def empirical_C(self) -> float:
        return max(self.max.values()) if self.max else 0.0

    def summary(self) -> dict:
        return {"max": self.max, "mean": self.mean, "empirical_C": self.empirical_C}


def _ensemble(grid: GridSpec, nu: float, seed: int, size: int, constant_f: bool = False):
    s0 = critical_index(nu).s0
    rng = np.random.default_rng(seed)
    for _ in range(size):
        f = random_field(grid, rng, decay=s0 + 0.5)
        g = random_field(grid, rng, decay=s0 + 0.5)
        if constant_f:
            f = SpectralField.constant(grid, f.mean())
        yield f, g


def commutator_bound_audit(ensemble_size: int, grid: GridSpec, nu: float, seed: int = 0,
                           constant_f: bool = False) -> AuditReport:
    """Empirical ratios for the three commutator estimates over a seeded ensemble.

    Samples are pairs of random band-limited fields whose coefficients are
    standard normal, damped by ``(1+|k|)^{-s0-1/2}``.  ``constant_f`` replaces
    each ``f`` by its mean, which makes every ratio vanish.
    """
    if ensemble_size < 1:
        raise ValueError("ensemble_size must be >= 1")
    rows = [audit_ratios(f, g, nu)
            for f, g in _ensemble(grid, nu, seed, ensemble_size, constant_f)]
    return AuditReport(nu, grid.N, seed, np.array(rows))


def product_bound_audit(ensemble_size: int, grid: GridSpec, nu: float, seed: int = 0) -> AuditReport:
    """Empirical Moser-type product constants over the same ensemble law.

    Records ``||fg||_{B^{s0}_{2,1}} / (||f||_{B^{s0}_{2,1}} ||g||_{B^{s0}_{2,1}})``
    and the transport-source ratio
    ``||d_x P(D)(f + f^2)||_{B^{s0}_{2,1}} / (||f|| + ||f||^2)``.
    """
    s0 = critical_index(nu).s0
    spec = BesovSpec(s0, 2, 1)
    rows = []
    for f, g in _ensemble(grid, nu, seed, ensemble_size):
        nf, ng = besov_norm(f, spec), besov_norm(g, spec)
        prod = besov_norm(pointwise_product(f, g), spec) / (nf * ng)
        f1 = f + pointwise_product(f, f)
        src = besov_norm(derivative(p_operator(f1, nu)), spec) / (nf + nf**2)
        rows.append((prod, src))
    return AuditReport(nu, grid.N, seed, np.array(rows), names=("product", "source"))
