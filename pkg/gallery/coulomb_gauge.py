r"""
Coulomb gauge
=============

Minimising ``||u*A||²`` over gauge maps drives ``d*(u*A)`` to zero.  For a
pure gauge ``A = u₀⁻¹du₀`` the minimiser undoes ``u₀``.  For a generic
small field the discrete critical point sits an ``O(h⁴)`` distance from
exact Coulomb gauge, which sets a floor on the reachable residual.
"""

from gaugeflow import GridSpec, lp_norm
from gaugeflow.connection import gauge_transform_connection
from gaugeflow.gaugefix import coulomb_residual, fix_coulomb, uhlenbeck_report
from gaugeflow.sampling import random_form, random_gauge

grid = GridSpec(2, 32)
u0 = random_gauge(2, 2, seed=4, amplitude=0.3).sample(grid)
A = gauge_transform_connection(u0, random_form(2, 1, 2, 0, 0.0).sample(grid))
res = fix_coulomb(A, tol=1e-6 * lp_norm(A), kappa=None)
print(f"pure gauge: ||A|| {lp_norm(A):.3e}, residual {res.residual:.2e} after {res.iterations} iterations, "
      f"||u*A|| {lp_norm(res.omega):.2e}")

for N in (16, 32, 64):
    g = GridSpec(2, N)
    B = random_form(2, 1, 2, seed=2, amplitude=0.05, band_limit=2).sample(g)
    res = fix_coulomb(B, tol=1e-12, max_iter=200, kappa=None)
    rep = uhlenbeck_report(res, 2) if res.converged else None
    floor = res.residual / lp_norm(B)
    print(f"generic N={N:3d}: d*A {coulomb_residual(B):.2e} -> {res.residual:.2e} "
          f"(relative floor {floor:.1e})" + (f", Uhlenbeck ratio {rep.ratio:.4f}" if rep else ""))
