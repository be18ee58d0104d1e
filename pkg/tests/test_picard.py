import math

import numpy as np
import pytest

from fchlab.littlewood_paley import low_cutoff
from fchlab.model import FchParams, Form
from fchlab.picard import (
    FieldTrajectory, LifespanEstimate, bound_check, lifespan, picard_run, picard_step,
    transport_solve,
)
from fchlab.spectral import SpectralField, make_grid

from conftest import TWO_PI, band_limited, rel, trig

S32 = Form.SIMPLIFIED_32


class TestLifespan:
    def test_formula_examples(self):
        assert lifespan(2.0, 1.0, 1.4).T == pytest.approx(1 / 16)
        assert lifespan(0.01, 1.0, 1.4).T == 1.0

    def test_zero_datum(self, grid2pi):
        est = lifespan(SpectralField.zeros(grid2pi), 4.0, 1.4)
        assert est.T == 0.25 and est.branches[1] == math.inf

    def test_cosine_datum(self, grid2pi):
        est = lifespan(trig(grid2pi, 1, 0.05), 1.0, 2.0)
        norm = 0.05 * 2**-3.5 * math.sqrt(math.pi)
        assert est.u0_norm == pytest.approx(norm, rel=1e-14)
        assert est.T == min(1.0, 1 / (8 * est.u0_norm))

    def test_branches(self):
        e = LifespanEstimate(2.0, 0.0, 0.5)
        assert e.branches == (0.5, 0.125)

    def test_rejects_nonpositive_constant(self):
        with pytest.raises(ValueError):
            lifespan(1.0, 0.0, 1.4)


class TestTransport:
    def test_pure_advection(self, grid2pi):
        times = np.linspace(0, 0.5, 51)
        zero = FieldTrajectory.zeros(grid2pi, times)
        out = transport_solve(zero, zero, trig(grid2pi, 1))
        exact = SpectralField(grid2pi, values=np.cos(grid2pi.x - 0.5))
        assert (out.field(len(out) - 1) - exact).linf_norm() < 1e-8

    def test_zero_data(self, grid2pi):
        times = np.linspace(0, 0.3, 11)
        v = FieldTrajectory.constant(0.1 * band_limited(grid2pi, 1), times)
        zero = FieldTrajectory.zeros(grid2pi, times)
        out = transport_solve(v, zero, SpectralField.zeros(grid2pi))
        assert np.all(out.coeffs == 0)

    def test_linearity(self, grid2pi):
        times = np.linspace(0, 0.3, 16)
        v = FieldTrajectory.from_fields(
            [0.1 * band_limited(grid2pi, 1) * (1 + t) for t in times], times)
        r1 = FieldTrajectory.constant(band_limited(grid2pi, 2), times)
        r2 = FieldTrajectory.from_fields([band_limited(grid2pi, 3) * t for t in times], times)
        a, b = band_limited(grid2pi, 4), band_limited(grid2pi, 5)
        sa = transport_solve(v, r1, a, dt_sub=0.005)
        sb = transport_solve(v, r2, b, dt_sub=0.005)
        sab = transport_solve(v, r1 + r2, a + b, dt_sub=0.005)
        diff = np.abs(sab.coeffs - sa.coeffs - sb.coeffs).max()
        assert diff < 1e-11 * np.abs(sab.coeffs).max()

    def test_substeps_converge(self, grid2pi):
        times = np.linspace(0, 0.5, 6)
        zero = FieldTrajectory.zeros(grid2pi, times)
        out = transport_solve(zero, zero, trig(grid2pi, 1), dt_sub=0.01)
        exact = SpectralField(grid2pi, values=np.cos(grid2pi.x - 0.5))
        assert (out.field(5) - exact).linf_norm() < 1e-8

    def test_time_grid_mismatch(self, grid2pi):
        a = FieldTrajectory.zeros(grid2pi, np.linspace(0, 1, 5))
        b = FieldTrajectory.zeros(grid2pi, np.linspace(0, 1, 6))
        with pytest.raises(ValueError):
            transport_solve(a, b, trig(grid2pi, 1))

    def test_frozen_steady_state(self, grid2pi):
        times = np.linspace(0, 0.5, 21)
        c = SpectralField.constant(grid2pi, 0.3)
        nxt = picard_step(FieldTrajectory.constant(c, times), c, 1.4)
        assert np.abs(nxt.coeffs - c.coefficients).max() < 1e-9


@pytest.fixture(scope="module")
def small_trace():
    g = make_grid(TWO_PI, 64)
    u0 = trig(g, 1, 0.05) + 0.01 * band_limited(g, 3, 4.0)
    return u0, picard_run(u0, 6, 0.2, FchParams(1.4, S32), 40, C_hat=3.0)


class TestPicardRun:
    def test_zero_datum(self, grid2pi):
        tr = picard_run(SpectralField.zeros(grid2pi), 3, 0.1, FchParams(1.4, S32), 5, C_hat=1.0)
        assert all(np.all(it.coeffs == 0) for it in tr.iterates)
        assert np.all(tr.w_n1 == 0)

    def test_validation(self, grid2pi):
        u0 = trig(grid2pi, 1, 0.05)
        with pytest.raises(ValueError):
            picard_run(u0, 2, 0.1, FchParams(1.4, Form.NONLOCAL_31), 5)
        with pytest.raises(ValueError):
            picard_run(u0, 0, 0.1, FchParams(1.4, S32), 5)
        with pytest.raises(ValueError):
            picard_run(u0, 2, 0.0, FchParams(1.4, S32), 5)

    def test_initialization(self, small_trace):
        u0, tr = small_trace
        assert np.all(tr.iterates[0].coeffs == 0)
        for n in range(tr.n_max):
            start = tr.iterates[n + 1].field(0)
            assert (start - low_cutoff(u0, n + 1)).l2_norm() < 1e-12

    def test_telescoping(self, small_trace):
        _, tr = small_trace
        for n, wnn in tr.w_nn.items():
            assert np.all(wnn <= tr.w_n1[n:2 * n].sum(axis=0) + 1e-9)

    def test_geometric_decay(self, small_trace):
        _, tr = small_trace
        assert np.all(tr.decay_ratios()[2:] < 0.9)

    def test_bound(self, small_trace):
        u0, tr = small_trace
        rep = bound_check(tr, 3.0, tr.u0_norm)
        assert rep.passed
        np.testing.assert_allclose(rep.margin, tr.bound_margin)

    def test_iterate_at(self, small_trace):
        _, tr = small_trace
        mid = 0.5 * (tr.time_grid[3] + tr.time_grid[4])
        got = tr.iterate_at(2, mid)
        want = 0.5 * (tr.iterates[2].field(3) + tr.iterates[2].field(4))
        assert rel(got, want) < 1e-15


class TestBoundCheck:
    def test_zero_trace_passes(self, grid2pi):
        tr = picard_run(SpectralField.zeros(grid2pi), 2, 0.1, FchParams(1.4, S32), 4)
        assert bound_check(tr, 1.0, 0.0).passed

    def test_singularity(self, grid2pi):
        tr = picard_run(trig(grid2pi, 1, 0.05), 1, 0.5, FchParams(1.4, S32), 4)
        with pytest.raises(ValueError):
            bound_check(tr, 10.0, 1.0)

    def test_reports_violations(self, grid2pi):
        tr = picard_run(trig(grid2pi, 1, 0.05), 2, 0.1, FchParams(1.4, S32), 4)
        rep = bound_check(tr, 1.0, 1e-6)
        assert not rep.passed
        n, t, m = rep.violations[0]
        assert n >= 1 and 0 <= t <= 0.1 and m < 0
