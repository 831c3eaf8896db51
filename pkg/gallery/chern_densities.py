r"""
Chern-Weil densities
====================

For su(k) the first density ``tr(iF/2π)`` vanishes identically.  On ``T⁴``
the second density ``tr(F∧F)/8π²`` is exact, so its integral over the
trivial bundle is zero; the discrete sum reproduces that to rounding.
Large grids are integrated tile by tile.
"""

import time

import numpy as np

from gaugeflow import GridSpec
from gaugeflow.chern import chern_density, closedness_residual
from gaugeflow.sampling import random_form
from gaugeflow.windows import tiled_chern_integral

A = random_form(2, 1, 3, seed=1, amplitude=0.8).sample(GridSpec(2, 32, 3))
print(f"su(3) on T^2: max |p1| = {np.abs(chern_density(A, 1).field.data).max():.1e}")

A = random_form(3, 1, 2, seed=2, amplitude=0.8).sample(GridSpec(3, 16))
print(f"T^3: ||d p1|| = {closedness_residual(A, 1):.1e}")

field = random_form(4, 1, 2, seed=3, amplitude=0.8, band_limit=1)
for N in (8, 16, 32):
    t0 = time.perf_counter()
    value = tiled_chern_integral(field, GridSpec(4, N), 2)
    print(f"T^4 N={N:2d}: integral of p2 = {value:+.2e} ({time.perf_counter() - t0:.1f} s)")
