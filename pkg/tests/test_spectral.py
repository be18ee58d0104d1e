import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fchlab.spectral import (
    GridSpec, MultiplierOp, SpectralField, dealias, derivative, fractional_laplacian,
    make_grid, p_operator, pointwise_product, random_field, smoothing_inverse,
)

from conftest import TWO_PI, band_limited, rel, trig

seeds = st.integers(0, 2**31 - 1)


def field(grid, f):
    return SpectralField.from_function(grid, f)


class TestGrid:
    def test_nodes_and_wavenumbers(self):
        g = make_grid(TWO_PI, 16)
        np.testing.assert_allclose(g.x, np.arange(16) * math.pi / 8)
        assert sorted(g.wavenumbers.tolist()) == list(range(-8, 8))

    def test_smallest_wavenumber(self):
        assert make_grid(4 * math.pi, 32).dk == pytest.approx(0.5)

    @pytest.mark.parametrize("n", [15, 24, 8, 0])
    def test_rejects_bad_sizes(self, n):
        with pytest.raises(ValueError):
            make_grid(TWO_PI, n)

    def test_rejects_bad_length_and_fraction(self):
        with pytest.raises(ValueError):
            make_grid(-1.0, 16)
        with pytest.raises(ValueError):
            GridSpec(1.0, 16, 0.0)

    def test_dealias_cutoff(self):
        g = make_grid(TWO_PI, 16)
        assert g.cutoff == pytest.approx(16 / 3)
        assert g.dealias_mask.sum() == 6


class TestField:
    def test_needs_one_representation(self):
        g = make_grid(TWO_PI, 16)
        with pytest.raises(ValueError):
            SpectralField(g)
        with pytest.raises(ValueError):
            SpectralField(g, values=np.zeros(16), coeffs=np.zeros(9))

    def test_immutable(self, grid2pi):
        u = trig(grid2pi, 1)
        with pytest.raises(ValueError):
            u.values[0] = 1.0

    def test_scalar_arithmetic(self, grid2pi):
        u = trig(grid2pi, 1)
        np.testing.assert_allclose(((2 * u + 1) - u).values, np.cos(grid2pi.x) + 1, atol=1e-14)
        np.testing.assert_allclose((u / 2).values, np.cos(grid2pi.x) / 2, atol=1e-15)

    def test_norms_of_cosine(self, grid2pi):
        u = trig(grid2pi, 1)
        assert u.l2_norm() == pytest.approx(math.sqrt(math.pi), rel=1e-14)
        assert u.linf_norm() == pytest.approx(1.0)
        assert abs(u.integral()) < 1e-14

    @given(seeds)
    def test_round_trip(self, seed):
        g = make_grid(TWO_PI, 64)
        v = np.random.default_rng(seed).standard_normal(64)
        u = SpectralField(g, values=v)
        back = SpectralField(g, coeffs=u.coefficients).values
        assert np.max(np.abs(back - v)) < 1e-13 * np.max(np.abs(v))

    @given(seeds)
    def test_parseval(self, seed):
        g = make_grid(3.0, 128)
        u = band_limited(g, seed, 0.0)
        direct = np.sum(u.values**2) * g.dx
        assert u.l2_norm() ** 2 == pytest.approx(direct, rel=1e-12)


class TestMultipliers:
    def test_laplacian_kills_constants(self, grid2pi):
        u = SpectralField.constant(grid2pi, 3.0)
        assert fractional_laplacian(u, 1.7).l2_norm() == 0.0

    def test_laplacian_cos(self, grid2pi):
        u = trig(grid2pi, 1)
        np.testing.assert_allclose(fractional_laplacian(u, 1.0).values, u.values, atol=1e-14)

    def test_laplacian_fractional_power(self, grid2pi):
        u = trig(grid2pi, 2)
        # |2|^(2*1.5) = 8
        np.testing.assert_allclose(fractional_laplacian(u, 1.5).values, 8 * u.values, atol=1e-13)

    def test_laplacian_rejects_small_nu(self, grid2pi):
        with pytest.raises(ValueError):
            fractional_laplacian(trig(grid2pi, 1), 0.5)

    def test_smoothing_inverse_examples(self, grid2pi):
        u = trig(grid2pi, 1)
        np.testing.assert_allclose(smoothing_inverse(u, 1.0, 1.25).values, 4 / 9 * u.values,
                                   atol=1e-15)
        c = SpectralField.constant(grid2pi, 2.5)
        np.testing.assert_allclose(smoothing_inverse(c, 1.3, 0.7).values, 2.5, atol=1e-15)

    def test_smoothing_inverse_cos4(self, grid2pi):
        u = trig(grid2pi, 4)
        out = smoothing_inverse(u, 2.0, 1.0)
        np.testing.assert_allclose(out.values, u.values / 257, atol=1e-15)
        recovered = out + derivative(out, 4)
        np.testing.assert_allclose(recovered.values, u.values, atol=1e-13)

    def test_smoothing_inverse_rejects_nonpositive_a(self, grid2pi):
        with pytest.raises(ValueError):
            smoothing_inverse(trig(grid2pi, 1), 1.0, 0.0)

    def test_p_operator_sign(self, grid2pi):
        u = trig(grid2pi, 1)
        np.testing.assert_allclose(p_operator(u, 1.0).values, -0.5 * u.values, atol=1e-15)

    def test_multiplier_op(self, grid2pi):
        op = MultiplierOp(lambda k: k**2, "minus second derivative")
        u = trig(grid2pi, 3, kind='sin')
        np.testing.assert_allclose(op(u).values, 9 * u.values, atol=1e-13)

    @given(seeds, st.floats(1.0, 3.0), st.floats(0.1, 3.0))
    def test_composition_identity(self, seed, nu, a):
        g = make_grid(TWO_PI, 64)
        u = band_limited(g, seed)
        w = smoothing_inverse(u, nu, a)
        back = w + a * fractional_laplacian(w, nu)
        assert rel(back, u) < 1e-12

    @given(seeds, st.floats(1.0, 3.0))
    def test_real_output(self, seed, nu):
        g = make_grid(TWO_PI, 64)
        u = band_limited(g, seed)
        for out in (fractional_laplacian(u, nu), derivative(u, 3), p_operator(u, nu)):
            full = np.fft.ifft(np.fft.ifftshift(out.full_coefficients()) * g.N)
            assert np.max(np.abs(full.imag)) <= 1e-13 * max(np.max(np.abs(full.real)), 1e-300)


class TestDerivative:
    def test_examples(self, grid2pi):
        s = trig(grid2pi, 1, kind='sin')
        np.testing.assert_allclose(derivative(s).values, np.cos(grid2pi.x), atol=1e-14)
        c3 = trig(grid2pi, 3)
        np.testing.assert_allclose(derivative(c3, 2).values, -9 * c3.values, atol=1e-13)
        assert derivative(SpectralField.constant(grid2pi, 4.0), 3).l2_norm() == 0.0

    def test_odd_orders_drop_nyquist(self):
        g = make_grid(TWO_PI, 16)
        u = trig(g, 8)
        assert derivative(u).l2_norm() == 0.0
        assert derivative(u, 2).l2_norm() > 0.0


class TestDealiasAndProduct:
    def test_dealias_examples(self):
        g = make_grid(TWO_PI, 16)
        assert dealias(trig(g, 6)).l2_norm() == 0.0
        c4 = trig(g, 4)
        np.testing.assert_allclose(dealias(c4).values, c4.values, atol=1e-15)

    def test_fraction_one_is_identity(self):
        g = make_grid(TWO_PI, 16, 1.0)
        v = np.random.default_rng(1).standard_normal(16)
        u = SpectralField(g, values=v)
        np.testing.assert_array_equal(dealias(u).coefficients, u.coefficients)

    def test_product_examples(self, grid2pi):
        c = trig(grid2pi, 1)
        np.testing.assert_allclose(pointwise_product(c, c).values,
                                   (1 + np.cos(2 * grid2pi.x)) / 2, atol=1e-15)
        v = band_limited(grid2pi, 3)
        one = SpectralField.constant(grid2pi, 1.0)
        assert rel(pointwise_product(one, v), dealias(v)) < 1e-15

    def test_high_mode_square(self):
        g = make_grid(TWO_PI, 16)
        c7 = trig(g, 7)
        np.testing.assert_allclose(pointwise_product(c7, c7).values, 0.5, atol=1e-15)

    @given(seeds, seeds)
    def test_product_symmetric_and_band_limited(self, s1, s2):
        g = make_grid(TWO_PI, 64)
        u, v = band_limited(g, s1), band_limited(g, s2)
        uv = pointwise_product(u, v)
        assert rel(uv, pointwise_product(v, u)) < 1e-15
        assert np.all(uv.coefficients[~g.dealias_mask] == 0)


def test_random_field_is_seeded_and_band_limited():
    g = make_grid(TWO_PI, 64)
    a = random_field(g, np.random.default_rng(5), decay=1.0)
    b = random_field(g, np.random.default_rng(5), decay=1.0)
    np.testing.assert_array_equal(a.coefficients, b.coefficients)
    assert np.all(a.coefficients[~g.dealias_mask] == 0)
    assert a.coefficients[-1] == 0
