"""Time integration with RK4: convergence order and continuous dependence."""
import math

import numpy as np

from fchlab import FchParams, SolverConfig, continuous_dependence_probe, integrate, make_grid
from fchlab.io import profile_field
from fchlab.spectral import random_field

nu = 1.4
grid = make_grid(2 * math.pi, 256)
u0 = profile_field("cosine:0.05,1", grid)

finals = [integrate(u0, SolverConfig(dt, 0.5, monitor_stride=10**6), FchParams(nu)).final
          for dt in (1e-2, 5e-3, 2.5e-3)]
e1, e2 = (finals[0] - finals[1]).l2_norm(), (finals[1] - finals[2]).l2_norm()
print(f"observed order {math.log2(e1 / e2):.3f}")

rec = integrate(u0, SolverConfig(1e-2, 1.0, monitor_stride=20), FchParams(nu))
for t, n in zip(rec.times, rec.norms):
    print(f"t={t:.2f}  l2={n['l2']:.6f}  mass={n['mass']:+.2e}  |u_x|_inf={n['linf_ux']:.5f}")

direction = random_field(grid, np.random.default_rng(10), decay=3.0)
cfg = SolverConfig(1e-2, 1.0, monitor_stride=5)
for delta in (1e-3, 1e-4, 1e-5):
    print(f"delta={delta:g}: growth factor",
          continuous_dependence_probe(u0, delta, direction, cfg, FchParams(nu)))
