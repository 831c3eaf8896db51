import numpy as np
import pytest

from gaugeflow._kernels import HAVE_NUMBA
from gaugeflow.chern import chern_integral
from gaugeflow.connection import (
    CovariantTensor,
    GaugeField,
    covariant_codiff,
    curvature,
    full_covariant_derivative,
    gauge_transform_connection,
)
from gaugeflow.forms import GridSpec, pointwise_norm_sq
from gaugeflow.functionals import FunctionalSpec, evaluate, sobolev_profile
from gaugeflow.liealg import random_group_element
from gaugeflow.sampling import random_form, random_gauge
from gaugeflow.windows import plan_tiles, tiled_chern_integral, tiled_functionals, tiled_reduce


def test_small_grid_is_one_tile():
    tiles = plan_tiles(GridSpec(2, 16), 2)
    assert len(tiles) == 1 and tiles[0].tiled_axes == 0


def test_tiles_cover_every_site_once():
    g = GridSpec(3, 16)
    tiles = plan_tiles(g, 1, budget=1500)
    assert len(tiles) > 1
    counts = np.zeros(g.shape, dtype=int)
    for t in tiles:
        sl = np.ix_(*[ix[2:-2] % g.N for ix in t.index])
        counts[sl + (slice(None),) * (g.m - t.tiled_axes)] += 1
    assert np.all(counts == 1)


def test_budget_too_small():
    with pytest.raises(ValueError):
        plan_tiles(GridSpec(2, 16), 3, budget=10)


def test_tiled_reduce_sum_and_max():
    g = GridSpec(2, 16)
    field = random_form(2, 0, 2, 1, 1.0, 2)

    def compute(tile):
        B = field.sample(g, tile.index)
        return {"s": pointwise_norm_sq(B.data, 2)}

    direct = pointwise_norm_sq(field.sample(g).data, 2)
    total = tiled_reduce(g, compute, 0, budget=64)
    assert total["s"] == pytest.approx(direct.sum(), rel=1e-13)
    assert tiled_reduce(g, compute, 0, budget=64, reduce="max")["s"] == direct.max()
    with pytest.raises(ValueError):
        tiled_reduce(g, compute, 0, reduce="mean")


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("gauge", [None, "constant", "smooth"])
def test_tiled_functionals_match_direct(n, gauge):
    g = GridSpec(3, 32, 2, n)
    field = random_form(3, 1, 2, 4, 0.4, 2)
    A = field.sample(g)
    if gauge == "constant":
        gv = random_group_element(5, 1.0, 2)
        A = gauge_transform_connection(GaugeField.constant(g, gv), A)
    elif gauge == "smooth":
        gv = random_gauge(3, 2, 6)
        A = gauge_transform_connection(gv.sample(g), A)
    else:
        gv = None
    out = tiled_functionals(field, g, n, gauge=gv, budget=8000)
    assert out["Y"] == pytest.approx(evaluate(FunctionalSpec("Yn", n), A), rel=1e-12)
    assert out["Z"] == pytest.approx(evaluate(FunctionalSpec("Zn", n), A), rel=1e-12)
    np.testing.assert_allclose(out["profile"], sobolev_profile(A, n), rtol=1e-12)


def test_tiled_functionals_rejects_orders():
    with pytest.raises(ValueError):
        tiled_functionals(random_form(2, 1, 2, 1), GridSpec(2, 16, 2, 4), 4)


def test_tiled_chern_matches_direct():
    g = GridSpec(4, 12)
    field = random_form(4, 1, 2, 2, 0.8, 1)
    assert tiled_chern_integral(field, g, 2, budget=5000) == pytest.approx(
        chern_integral(field.sample(g), 2), abs=1e-15)
    with pytest.raises(ValueError):
        tiled_chern_integral(field, g, 1)


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")
def test_fused_kernels_match_reference():
    from gaugeflow._kernels import fused_curvature, fused_first_order

    g = GridSpec(3, 16)
    A = random_form(3, 1, 2, 8, 0.5, 2).sample(g)
    F = curvature(A)
    np.testing.assert_allclose(fused_curvature(A.data, 3, g.h), F.data, atol=1e-12)
    f_sq, df_sq, cod_sq = fused_first_order(A.data, 3, g.h)
    T = full_covariant_derivative(A, CovariantTensor.from_form(F))
    np.testing.assert_allclose(f_sq, pointwise_norm_sq(F.data, 3), rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(df_sq, T.pointwise_norm_sq(), rtol=1e-11, atol=1e-12)
    np.testing.assert_allclose(cod_sq, pointwise_norm_sq(covariant_codiff(A, F).data, 3), rtol=1e-11, atol=1e-12)
