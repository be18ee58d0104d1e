"""Periodic grids, real spectral fields and Fourier multipliers.

A :class:`SpectralField` is a real periodic function sampled on a uniform
grid of ``N`` points over a period ``L``.  It carries both the grid samples
and the normalized one-sided Fourier coefficients

.. math::

    u(x) = \\sum_m c_m e^{i k_m x}, \\qquad k_m = 2\\pi m / L,

stored in ``numpy.fft.rfft`` order (``m = 0 .. N/2``) with ``c = rfft(u)/N``.
Whichever representation is not supplied at construction is computed on
first access.  Fields are immutable; every operation returns a new field.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "GridSpec",
    "SpectralField",
    "MultiplierOp",
    "make_grid",
    "apply_multiplier",
    "fractional_laplacian",
    "smoothing_inverse",
    "p_operator",
    "derivative",
    "dealias",
    "pointwise_product",
    "random_field",
]


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid of ``N`` points on ``[0, L)``.

    ``dealias_fraction`` is the fraction of the ``N/2`` resolvable modes kept
    after a nonlinear operation (2/3 by default).
    """

    L: float
    N: int
    dealias_fraction: float = 2.0 / 3.0

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or isinstance(self.N, bool):
            raise TypeError(f"N must be an integer, got {self.N!r}")
        if not _is_power_of_two(int(self.N)):
            raise ValueError(f"N must be a power of two, got {self.N}")
        if self.N < 16:
            raise ValueError(f"N must be at least 16, got {self.N}")
        if not (np.isfinite(self.L) and self.L > 0):
            raise ValueError(f"L must be positive, got {self.L}")
        if not (0 < self.dealias_fraction <= 1):
            raise ValueError(
                f"dealias_fraction must lie in (0, 1], got {self.dealias_fraction}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "dealias_fraction", float(self.dealias_fraction))

    @property
    def dx(self) -> float:
        return self.L / self.N

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.N) * (self.L / self.N)

    @property
    def dk(self) -> float:
        """Lattice spacing ``2*pi/L`` in wavenumber."""
        return 2.0 * np.pi / self.L

    @property
    def modes(self) -> np.ndarray:
        """Integer mode numbers ``m`` in ``[-N/2, N/2)``, ascending."""
        return np.arange(-self.N // 2, self.N // 2)

    @property
    def wavenumbers(self) -> np.ndarray:
        """Wavenumbers ``2*pi*m/L`` for ``m`` in ``[-N/2, N/2)``, ascending."""
        return self.modes * self.dk

    @property
    def rmodes(self) -> np.ndarray:
        """Mode numbers ``0 .. N/2`` matching the stored coefficient layout."""
        return np.arange(self.N // 2 + 1)

    @property
    def rk(self) -> np.ndarray:
        """Nonnegative wavenumbers matching the stored coefficient layout."""
        return self.rmodes * self.dk

    @property
    def cutoff(self) -> float:
        """Largest retained ``|m|`` after dealiasing (not necessarily integer)."""
        return self.dealias_fraction * self.N / 2

    @property
    def dealias_mask(self) -> np.ndarray:
        return self.rmodes <= self.cutoff + 1e-12

    @property
    def parseval_weights(self) -> np.ndarray:
        """Multiplicity of each stored coefficient in the two-sided spectrum."""
        w = np.full(self.N // 2 + 1, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        return w


def make_grid(L: float, N: int, dealias_fraction: float = 2.0 / 3.0) -> GridSpec:
    """Return the uniform grid ``x_j = j L / N`` with wavenumbers ``2 pi m / L``.

    Raises ``ValueError`` for a non-power-of-two or too small ``N`` and for a
    nonpositive period.
    """
    return GridSpec(L, N, dealias_fraction)


class SpectralField:
    """Real periodic field held as grid samples and Fourier coefficients."""

    __slots__ = ("grid", "_values", "_coeffs")

    def __init__(self, grid: GridSpec, values=None, coeffs=None):
        if (values is None) == (coeffs is None):
            raise ValueError("pass exactly one of values or coeffs")
        self.grid = grid
        self._values = None
        self._coeffs = None
        if values is not None:
            v = np.array(values, dtype=np.float64)
            if v.shape != (grid.N,):
                raise ValueError(f"expected {grid.N} samples, got shape {v.shape}")
            v.flags.writeable = False
            self._values = v
        else:
            c = np.array(coeffs, dtype=np.complex128)
            if c.shape != (grid.N // 2 + 1,):
                raise ValueError(
                    f"expected {grid.N // 2 + 1} coefficients, got shape {c.shape}")
            # the zero and Nyquist modes of real data are real
            c[0] = c[0].real
            c[-1] = c[-1].real
            c.flags.writeable = False
            self._coeffs = c

    @classmethod
    def from_values(cls, grid: GridSpec, values) -> "SpectralField":
        return cls(grid, values=values)

    @classmethod
    def from_coefficients(cls, grid: GridSpec, coeffs) -> "SpectralField":
        return cls(grid, coeffs=coeffs)

    @classmethod
    def from_function(cls, grid: GridSpec, func: Callable) -> "SpectralField":
        """Sample ``func`` on the grid nodes (no dealiasing)."""
        return cls(grid, values=func(grid.x))

    @classmethod
    def zeros(cls, grid: GridSpec) -> "SpectralField":
        return cls(grid, coeffs=np.zeros(grid.N // 2 + 1, dtype=complex))

    @classmethod
    def constant(cls, grid: GridSpec, c: float) -> "SpectralField":
        coeffs = np.zeros(grid.N // 2 + 1, dtype=complex)
        coeffs[0] = c
        return cls(grid, coeffs=coeffs)

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            v = np.fft.irfft(self._coeffs * self.grid.N, n=self.grid.N)
            v.flags.writeable = False
            self._values = v
        return self._values

    @property
    def coefficients(self) -> np.ndarray:
        if self._coeffs is None:
            c = np.fft.rfft(self._values) / self.grid.N
            c.flags.writeable = False
            self._coeffs = c
        return self._coeffs

    def full_coefficients(self) -> np.ndarray:
        """Two-sided coefficients for ``m`` in ``[-N/2, N/2)``, ascending."""
        return np.fft.fftshift(np.fft.fft(self.values)) / self.grid.N

    # arithmetic -----------------------------------------------------------
    def _check(self, other: "SpectralField"):
        if self.grid != other.grid:
            raise ValueError("fields live on different grids")

    def __add__(self, other):
        if isinstance(other, SpectralField):
            self._check(other)
            return SpectralField(self.grid, coeffs=self.coefficients + other.coefficients)
        if np.isscalar(other):
            c = self.coefficients.copy()
            c[0] += other
            return SpectralField(self.grid, coeffs=c)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, SpectralField):
            self._check(other)
            return SpectralField(self.grid, coeffs=self.coefficients - other.coefficients)
        if np.isscalar(other):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return SpectralField(self.grid, coeffs=-self.coefficients)

    def __mul__(self, other):
        # scalar scaling only; use pointwise_product for field products
        if np.isscalar(other) and np.isreal(other):
            return SpectralField(self.grid, coeffs=self.coefficients * float(other))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            return self * (1.0 / other)
        return NotImplemented

    # norms ---------------------------------------------------------------
    def l2_norm(self) -> float:
        """``(int_0^L u^2 dx)^{1/2}`` computed by Parseval."""
        c = self.coefficients
        return float(np.sqrt(self.grid.L * np.sum(self.grid.parseval_weights * np.abs(c) ** 2)))

    def linf_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def mean(self) -> float:
        return float(self.coefficients[0].real)

    def integral(self) -> float:
        return self.grid.L * self.mean()

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.coefficients)))

    def __repr__(self):
        return f"SpectralField(L={self.grid.L:g}, N={self.grid.N}, l2={self.l2_norm():.6g})"


@dataclass(frozen=True)
class MultiplierOp:
    """Fourier multiplier with a real, even symbol ``symbol(|k|)``."""

    symbol: Callable[[np.ndarray], np.ndarray]
    description: str = ""

    def __call__(self, u: SpectralField) -> SpectralField:
        return apply_multiplier(u, self.symbol(np.abs(u.grid.rk)))


def apply_multiplier(u: SpectralField, table: np.ndarray) -> SpectralField:
    return SpectralField(u.grid, coeffs=u.coefficients * table)


def _fractional_symbol(k: np.ndarray, nu: float) -> np.ndarray:
    return np.abs(k) ** (2.0 * nu)


def fractional_laplacian(u: SpectralField, nu: float) -> SpectralField:
    r"""Apply :math:`(-\partial_x^2)^\nu`, the multiplier :math:`|k|^{2\nu}`."""
    if nu < 1:
        raise ValueError(f"nu must be >= 1, got {nu}")
    return apply_multiplier(u, _fractional_symbol(u.grid.rk, nu))


def smoothing_inverse(u: SpectralField, nu: float, a: float) -> SpectralField:
    r"""Apply :math:`(1 + a(-\partial_x^2)^\nu)^{-1}`."""
    if not a > 0:
        raise ValueError(f"a must be positive, got {a}")
    return apply_multiplier(u, 1.0 / (1.0 + a * _fractional_symbol(u.grid.rk, nu)))


def p_operator(u: SpectralField, nu: float) -> SpectralField:
    r"""Apply :math:`P(D) = -(1 + (-\partial_x^2)^\nu)^{-1}`."""
    return apply_multiplier(u, -1.0 / (1.0 + _fractional_symbol(u.grid.rk, nu)))


def derivative(u: SpectralField, order: int = 1) -> SpectralField:
    """Exact derivative of the band-limited interpolant.

    For odd orders the unpaired Nyquist coefficient is set to zero.
    """
    if int(order) != order or order < 1:
        raise ValueError(f"order must be a positive integer, got {order}")
    table = (1j * u.grid.rk) ** int(order)
    if order % 2:
        table[-1] = 0.0
    return apply_multiplier(u, table)


def dealias(u: SpectralField) -> SpectralField:
    """Zero every coefficient with ``|m| > dealias_fraction * N / 2``."""
    return SpectralField(u.grid, coeffs=u.coefficients * u.grid.dealias_mask)


def _two_sided(c: np.ndarray, N: int) -> np.ndarray:
    # coefficients for m = -N/2 .. N/2, the Nyquist mode split evenly between +-N/2
    a = np.empty(N + 1, dtype=complex)
    a[N // 2:] = c
    a[: N // 2] = np.conj(c[:0:-1])
    a[0] *= 0.5
    a[-1] *= 0.5
    return a


def pointwise_product(u: SpectralField, v: SpectralField) -> SpectralField:
    """Dealiased product of two fields.

    The product of the two trigonometric interpolants is formed exactly as a
    discrete convolution of their coefficients, truncated back to ``N`` modes
    and then dealiased, so nothing aliases onto retained modes.  Direct
    convolution keeps the round-off of each output mode proportional to the
    terms feeding it, which matters once high-order multipliers act on the
    product.
    """
    if u.grid != v.grid:
        raise ValueError("fields live on different grids")
    N = u.grid.N
    w = np.convolve(_two_sided(u.coefficients, N), _two_sided(v.coefficients, N))
    cw = w[N: N + N // 2 + 1].copy()
    # the truncated Nyquist mode collects both +N/2 and -N/2 halves
    cw[-1] = 2.0 * cw[-1].real
    return SpectralField(u.grid, coeffs=cw * u.grid.dealias_mask)


def random_field(grid: GridSpec, rng: np.random.Generator, decay: float = 0.0,
                 amplitude: float = 1.0, mean: bool = True) -> SpectralField:
    """Random band-limited field with standard normal coefficients.

    Each retained mode gets independent standard normal real and imaginary
    parts damped by ``(1 + |k|)**(-decay)``.  Modes above the dealias cutoff
    and the Nyquist mode are zero.
    """
    m = grid.rmodes
    keep = grid.dealias_mask & (m < grid.N // 2)
    c = rng.standard_normal(m.size) + 1j * rng.standard_normal(m.size)
    c *= (1.0 + np.abs(grid.rk)) ** (-decay)
    c *= keep
    c[0] = c[0].real if mean else 0.0
    return SpectralField(grid, coeffs=amplitude * c)
