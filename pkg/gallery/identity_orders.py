r"""
Identity catalog
================

Exact identities hold to rounding on any grid.  Identities that involve
a non-constant gauge map or a derivative of a product only hold in the
continuum, and their residual must fall like ``h⁴``.  This script runs
the catalog on small grids and prints residuals and observed orders.
"""

from gaugeflow.verify import identity_catalog, run_catalog

cases = identity_catalog()
print(f"{len(cases)} cases:")
for case in cases:
    print(f"  {case.id:<38} {case.exactness:<6} {case.description}")

report = run_catalog(resolutions=(16, 32), dims=[2, 3])
print()
print(report.summary())
