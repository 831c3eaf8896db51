r"""
Sobolev profile
===============

For ``n = 3`` the gauge-invariant profile ``||F||_3³ + ||D_A F||_2²`` is
bounded by a multiple of ``Y₃ + Y₃^{2/3}``.  The constant is not
computable, but its empirical maximum over seeded fields should settle
under refinement.
"""

from gaugeflow import GridSpec
from gaugeflow.sampling import random_form
from gaugeflow.windows import tiled_functionals

for m in (2, 3):
    for N in (16, 32):
        grid = GridSpec(m, N, 2, 3)
        ratios = []
        for seed in range(1, 11):
            out = tiled_functionals(random_form(m, 1, 2, seed, 0.5, 2), grid, 3)
            y = out["Y"]
            ratios.append(sum(out["profile"]) / (y + y ** (2 / 3)))
        print(f"m={m} N={N:2d}: max ratio {max(ratios):.5f} over {len(ratios)} seeds")
