"""Fourier decay rate and truncated E_s norms along a sech-profile run."""
import math

from fchlab import FchParams, SolverConfig, es_trajectory, fourier_decay_fit, integrate, make_grid
from fchlab.io import profile_field

nu = 1.4
grid = make_grid(32 * math.pi, 1024)
u0 = profile_field("sech:0.5,1", grid)
print(f"initial decay rate {fourier_decay_fit(u0).sigma:.4f} (strip half-width pi/2 = {math.pi / 2:.4f})")

rec = integrate(u0, SolverConfig(5e-3, 0.25, monitor_stride=10), FchParams(nu))
rows = zip(rec.times, rec.snapshots, es_trajectory(rec, 0.3, 24, nu), es_trajectory(rec, 0.6, 24, nu))
for t, u, lo, hi in rows:
    print(f"t={t:.3f}  sigma={fourier_decay_fit(u).sigma:.4f}  "
          f"E_0.3={lo.value:.4e}  E_0.6={hi.value:.4e}  converged={lo.converged and hi.converged}")
