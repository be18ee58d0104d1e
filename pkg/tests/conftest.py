import math

import numpy as np
import pytest
from hypothesis import settings

from fchlab.spectral import make_grid, random_field

settings.register_profile("fchlab", max_examples=40, deadline=None)
settings.load_profile("fchlab")

TWO_PI = 2 * math.pi


@pytest.fixture
def grid2pi():
    return make_grid(TWO_PI, 64)


def band_limited(grid, seed, decay=2.0):
    return random_field(grid, np.random.default_rng(seed), decay=decay)


def rel(a, b):
    """Relative L2 distance between two fields."""
    scale = b.l2_norm()
    d = (a - b).l2_norm()
    return d if scale == 0 else d / scale


def trig(grid, k, amp=1.0, kind="cos"):
    """Exact band-limited ``amp*cos(kx)`` or ``amp*sin(kx)`` from its coefficients."""
    from fchlab.spectral import SpectralField

    m = int(round(k / grid.dk))
    c = np.zeros(grid.N // 2 + 1, dtype=complex)
    if m == 0:
        c[0] = amp if kind == "cos" else 0.0
    elif m == grid.N // 2:
        c[m] = amp if kind == "cos" else 0.0
    else:
        c[m] = amp / 2 if kind == "cos" else amp / 2j
    return SpectralField(grid, coeffs=c)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for i in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[i][1])
