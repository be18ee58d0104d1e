import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fchlab.bony import (
    AuditReport, audit_ratios, bony_parts, commutator, commutator_bound_audit,
    commutator_split, paraproduct, paraproduct_prime, product_bound_audit, remainder,
)
from fchlab.littlewood_paley import critical_index, dyadic_block
from fchlab.spectral import SpectralField, derivative, fractional_laplacian, make_grid, pointwise_product

from conftest import TWO_PI, band_limited, rel, trig

seeds = st.integers(0, 2**31 - 1)
nus = st.sampled_from([1.0, 1.2, 1.5, 2.0, 2.7])


def ensemble_pair(grid, seed, nu=1.5):
    s0 = critical_index(nu).s0
    return band_limited(grid, seed, s0 + 0.5), band_limited(grid, seed + 1, s0 + 0.5)


class TestParaproducts:
    def test_constant_high_field(self, grid2pi):
        u = band_limited(grid2pi, 1)
        assert paraproduct(u, SpectralField.constant(grid2pi, 2.0)).l2_norm() == 0.0

    def test_constant_low_field(self, grid2pi):
        v = trig(grid2pi, 8)
        assert rel(dyadic_block(v, 2), v) < 1e-15
        assert rel(paraproduct(SpectralField.constant(grid2pi, 3.0), v), 3.0 * v) < 1e-14

    def test_remainder_of_constants(self, grid2pi):
        r = remainder(SpectralField.constant(grid2pi, 2.0), SpectralField.constant(grid2pi, -3.0))
        np.testing.assert_allclose(r.values, -6.0, atol=1e-14)

    def test_remainder_separated_blocks(self):
        g = make_grid(TWO_PI, 256)
        u, v = trig(g, 4), trig(g, 64)
        assert rel(dyadic_block(u, 1), u) < 1e-15 and rel(dyadic_block(v, 5), v) < 1e-15
        assert remainder(u, v).l2_norm() == 0.0

    def test_grid_mismatch(self, grid2pi):
        other = make_grid(4.0, 64)
        with pytest.raises(ValueError):
            paraproduct(band_limited(grid2pi, 0), band_limited(other, 0))

    @given(seeds, st.sampled_from([64, 256, 512]))
    def test_closure(self, seed, n):
        g = make_grid(TWO_PI, n)
        u, v = ensemble_pair(g, seed)
        uv = pointwise_product(u, v)
        parts = bony_parts(u, v)
        assert rel(parts.total(), uv) < 1e-11
        assert rel(parts.Tuv + paraproduct_prime(v, u), uv) < 1e-11
        assert rel(parts.Tuv + parts.Tprime_vu, uv) < 1e-11


class TestCommutator:
    def test_cos_example(self, grid2pi):
        u = trig(grid2pi, 1)
        c = commutator(u, derivative(u), 1.0)
        assert rel(c, trig(grid2pi, 2, 1.5, "sin")) < 1e-14

    @given(seeds, nus, st.floats(-10, 10))
    def test_kills_constants(self, seed, nu, c):
        g = make_grid(TWO_PI, 128)
        v = band_limited(g, seed)
        assert commutator(SpectralField.constant(g, c), v, nu).l2_norm() < 1e-13 * v.l2_norm()

    def test_split_of_constant(self, grid2pi):
        g = band_limited(grid2pi, 2)
        sp = commutator_split(SpectralField.constant(grid2pi, 1.7), g, 1.5)
        assert sp.F.l2_norm() == 0.0 and sp.G.l2_norm() == 0.0 and sp.total.l2_norm() == 0.0

    @given(seeds, nus)
    def test_split_identity(self, seed, nu):
        g = make_grid(TWO_PI, 128)
        f, h = ensemble_pair(g, seed, nu)
        sp = commutator_split(f, h, nu)
        assert rel(sp.F + sp.G, sp.total) < 1e-11

    def test_smoothing_gain(self):
        # the commutator has order 2nu - 1: it grows like |k|^{2nu-1} on a fixed low f
        g = make_grid(TWO_PI, 512)
        f = trig(g, 1)
        ratios = []
        for k in (16, 32, 64):
            c = commutator(f, trig(g, k), 1.5)
            ratios.append(c.l2_norm() / k ** 2.0)
        assert max(ratios) / min(ratios) < 1.2


class TestAudit:
    def test_constant_f(self):
        g = make_grid(TWO_PI, 128)
        rep = commutator_bound_audit(4, g, 1.5, seed=3, constant_f=True)
        assert rep.empirical_C == 0.0

    @pytest.mark.parametrize("lam,mu", [(0.25, 4.0), (4.0, 0.25), (4.0, 4.0)])
    def test_homogeneity(self, lam, mu):
        g = make_grid(TWO_PI, 128)
        f, h = ensemble_pair(g, 11, 2.0)
        base = audit_ratios(f, h, 2.0)
        scaled = audit_ratios(lam * f, mu * h, 2.0)
        np.testing.assert_allclose(scaled, base, rtol=1e-13)

    def test_report_is_deterministic(self):
        g = make_grid(TWO_PI, 64)
        a = commutator_bound_audit(5, g, 1.2, seed=7)
        b = commutator_bound_audit(5, g, 1.2, seed=7)
        np.testing.assert_array_equal(a.ratios, b.ratios)
        s = a.summary()
        assert set(s) == {"max", "mean", "empirical_C"}
        assert s["empirical_C"] == max(s["max"].values())
        assert a.ratios.shape == (5, 3)

    def test_product_audit(self):
        g = make_grid(TWO_PI, 64)
        rep = product_bound_audit(4, g, 1.5, seed=0)
        assert rep.names == ("product", "source")
        assert all(0 < v < 10 for v in rep.max.values())

    def test_empty_report(self):
        rep = AuditReport(1.5, 64, 0, np.zeros((0, 3)))
        assert rep.empirical_C == 0.0

    def test_rejects_empty_ensemble(self, grid2pi):
        with pytest.raises(ValueError):
            commutator_bound_audit(0, grid2pi, 1.5)
