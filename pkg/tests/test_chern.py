import numpy as np
import pytest

from conftest import sample_form
from gaugeflow.chern import chern_density, chern_integral, closedness_residual, power_traces
from gaugeflow.connection import curvature
from gaugeflow.forms import GridSpec, wedge
from gaugeflow.sampling import random_form
from gaugeflow.windows import tiled_chern_integral


@pytest.mark.parametrize("k", [2, 3])
def test_first_chern_density_vanishes_for_su(k):
    A = sample_form(2, 1, 16, 1, k=k, amplitude=0.8)
    assert np.abs(chern_density(A, 1).field.data).max() <= 1e-12


def test_second_density_is_trace_of_f_wedge_f():
    A = sample_form(4, 1, 8, 2, amplitude=0.8)
    F = curvature(A)
    expected = np.trace(wedge(F, F).data, axis1=-2, axis2=-1) / (8 * np.pi**2)
    got = chern_density(A, 2).field.data[..., 0, 0]
    np.testing.assert_allclose(got, expected.real, atol=1e-15)
    assert np.abs(expected.imag).max() < 1e-14


def test_power_traces_degrees():
    A = sample_form(4, 1, 8, 3)
    s = power_traces(curvature(A), 2)
    assert [t.degree for t in s] == [2, 4]
    assert s[0].grid.k == 1


def test_abelian_first_chern_integral_vanishes():
    g = GridSpec(2, 32, 1)
    A = random_form(2, 1, 1, 4, 0.7, 3).sample(g)
    assert abs(chern_integral(A, 1)) <= 1e-12


def test_trivial_bundle_second_chern_integral():
    for N in (8, 12):
        A = sample_form(4, 1, N, 5, amplitude=0.8, band_limit=1)
        assert abs(chern_integral(A, 2)) < 1e-6


def test_tiled_integral_matches_direct():
    A_field = random_form(4, 1, 2, 6, 0.8, 1)
    g = GridSpec(4, 12, 2, 2)
    direct = chern_integral(A_field.sample(g), 2)
    tiled = tiled_chern_integral(A_field, g, 2, budget=12**4 // 3)
    assert tiled == pytest.approx(direct, abs=1e-15)


def test_closedness_in_higher_dimension():
    A = sample_form(3, 1, 16, 7, amplitude=0.8)
    assert closedness_residual(A, 1) < 1e-12


def test_degree_checks():
    A2 = sample_form(2, 1, 8, 1)
    with pytest.raises(ValueError, match="overflow"):
        chern_density(A2, 2)
    with pytest.raises(ValueError):
        chern_density(A2, 0)
    with pytest.raises(ValueError):
        closedness_residual(A2, 1)
    with pytest.raises(ValueError):
        chern_integral(sample_form(3, 1, 8, 1), 1)
    with pytest.raises(ValueError):
        chern_density(sample_form(4, 1, 8, 1, k=1), 2)
