"""Fourier fields, exact products and the dyadic decomposition.

Builds a random band-limited field, splits it into Littlewood-Paley
blocks, checks that the blocks add back up, and prints a few Besov norms.
"""
import math

import numpy as np

from fchlab import BesovSpec, DyadicSystem, besov_norm, dyadic_block, make_grid, random_field
from fchlab.littlewood_paley import block_norms, qmax
from fchlab.spectral import SpectralField, pointwise_product

grid = make_grid(2 * math.pi, 256)
u = random_field(grid, np.random.default_rng(1), decay=2.0)

# cos(7x)^2 = 1/2 + cos(14x)/2, with no aliasing on a small grid
small = make_grid(2 * math.pi, 16)
c7 = SpectralField(small, values=np.cos(7 * small.x))
print("mean of cos(7x)^2 on N=16:", pointwise_product(c7, c7).mean())

blocks = [dyadic_block(u, q) for q in range(-1, qmax(grid) + 1)]
rebuilt = SpectralField(grid, coeffs=sum(b.coefficients for b in blocks))
print("blocks:", len(blocks), " reconstruction error:", (rebuilt - u).l2_norm())
print("partition of unity residual:", DyadicSystem(grid).partition_residual())

for q, a, b in zip(*block_norms(u)):
    print(f"  q={q:2d}  ||D_q u||_2={a:.3e}  ||D_q u||_inf={b:.3e}")

for s, p, r in ((0.0, 2, 2), (1.5, 2, 1), (2.5, 2, math.inf), (1.0, math.inf, 1)):
    print(f"B^{s}_{{{p},{r}}} norm: {besov_norm(u, BesovSpec(s, p, r)):.6e}")
print("L2 norm (Parseval):", u.l2_norm())
