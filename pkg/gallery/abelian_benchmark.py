r"""
Abelian benchmark
=================

The connection ``A = sin(2πx₂) X dx¹`` with ``<X, X> = 1`` has curvature
``F = -2π cos(2πx₂) X dx¹∧dx²`` and ``Y₂ = 2||F||² = 4π²``.  The stencil
replaces ``2π`` by its symbol ``s``, so the discrete value is exactly ``s²``
and the error falls like ``h⁴``.

Running the script also rewrites the snapshot shipped with the package.
"""

import numpy as np

from gaugeflow import FunctionalSpec, GridSpec, evaluate
from gaugeflow.forms import stencil_symbol
from gaugeflow.io import fixture_path, write_snapshot
from gaugeflow.sampling import abelian_benchmark

spec = FunctionalSpec("Yn", 2)
field = abelian_benchmark()

print(" N      Y2            s^2           |Y2 - 4pi^2| / 4pi^2")
prev = None
for N in (8, 16, 32, 64):
    A = field.sample(GridSpec(2, N))
    value = evaluate(spec, A)
    s = stencil_symbol(2 * np.pi / N, 1.0 / N)
    err = abs(value - 4 * np.pi**2) / (4 * np.pi**2)
    rate = "" if prev is None else f"  order {np.log2(prev / err):.2f}"
    print(f"{N:3d}  {value:.10f}  {s**2:.10f}  {err:.3e}{rate}")
    prev = err

write_snapshot(fixture_path(), field.sample(GridSpec(2, 64)), group="su2")
print("fixture written to", fixture_path())
