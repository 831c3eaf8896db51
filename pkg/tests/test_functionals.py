import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import sample_form
from gaugeflow.connection import (
    GaugeField,
    alternating_codiff,
    covariant_d,
    curvature,
    gauge_transform_connection,
)
from gaugeflow.forms import GridSpec, discrete_inner, lp_norm, stencil_symbol
from gaugeflow.functionals import (
    FunctionalSpec,
    el_residual,
    evaluate,
    first_variation_chain,
    gradient,
    gradient_report,
    sobolev_profile,
)
from gaugeflow.liealg import random_group_element
from gaugeflow.sampling import abelian_benchmark


def benchmark(N, n=2):
    return abelian_benchmark().sample(GridSpec(2, N, 2, n))


@pytest.mark.parametrize("N", [16, 64])
def test_abelian_benchmark_matches_fourier_oracle(N):
    # F = -s cos(2πx_2) X dx^1∧dx^2 exactly, s the stencil symbol at one wave
    s = stencil_symbol(2 * np.pi / N, 1.0 / N)
    c = np.cos(2 * np.pi * np.arange(N) / N)
    A = benchmark(N)
    assert evaluate(FunctionalSpec("YM"), A) == pytest.approx(s**2 / 4, rel=1e-13)
    assert evaluate(FunctionalSpec("Yn", 2), A) == pytest.approx(s**2, rel=1e-13)
    assert evaluate(FunctionalSpec("Zn", 2), A) == pytest.approx(s**2, rel=1e-13)
    A3 = benchmark(N, 3)
    y3 = s**4 / 2 + s**3 * np.mean(np.abs(c) ** 3)
    assert evaluate(FunctionalSpec("Yn", 3), A3) == pytest.approx(y3, rel=1e-13)
    assert evaluate(FunctionalSpec("YMn", 3), A3) == pytest.approx(s**3 * np.mean(np.abs(c) ** 3) / 3, rel=1e-13)


def test_abelian_benchmark_approaches_continuum_value():
    assert evaluate(FunctionalSpec("Yn", 2), benchmark(64)) == pytest.approx(4 * np.pi**2, rel=1e-5)


def test_spec_validation():
    with pytest.raises(ValueError):
        FunctionalSpec("Q")
    with pytest.raises(ValueError):
        FunctionalSpec("Yn", 1)
    with pytest.raises(ValueError):
        # m = 5 exceeds 2n for n = 2
        evaluate(FunctionalSpec("Yn", 2), sample_form(5, 1, 8, 1, n=3))


def test_zero_connection():
    A = sample_form(2, 1, 8, 0, amplitude=0.0)
    for kind in ("YM", "YMn", "Yn", "Zn"):
        spec = FunctionalSpec(kind, 2)
        assert evaluate(spec, A) == 0.0
        assert el_residual(spec, A) == 0.0


CASES = [("YM", 2, 2), ("YMn", 3, 2), ("Yn", 2, 2), ("Yn", 3, 2), ("Yn", 4, 2), ("Yn", 5, 2),
         ("Zn", 2, 2), ("Zn", 3, 2), ("Zn", 4, 2), ("Yn", 3, 3), ("Zn", 3, 3), ("Yn", 2, 4)]


@pytest.mark.parametrize("kind,n,m", CASES)
def test_gradient_matches_central_differences(kind, n, m):
    spec = FunctionalSpec(kind, n)
    A = sample_form(m, 1, 8, 3, amplitude=0.4, n=max(n, 2))
    dirs = [sample_form(m, 1, 8, 50 + i, amplitude=0.4, n=max(n, 2)) for i in range(2)]
    assert gradient_report(spec, A, dirs, t=1e-4).fd_error < 1e-6


@given(st.integers(0, 10_000))
@settings(max_examples=10, deadline=None)
def test_gradient_is_linear_functional(seed):
    spec = FunctionalSpec("Yn", 3)
    A = sample_form(2, 1, 8, seed, amplitude=0.3)
    a, b = sample_form(2, 1, 8, seed + 1), sample_form(2, 1, 8, seed + 2)
    G = gradient(spec, A)
    lhs = discrete_inner(G, a * 2.0 + b)
    rhs = 2.0 * discrete_inner(G, a) + discrete_inner(G, b)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-14)


def test_first_variation_base_case_is_bitwise():
    A, alpha = sample_form(3, 1, 8, 1), sample_form(3, 1, 8, 2)
    np.testing.assert_array_equal(first_variation_chain(A, alpha, 2).data, covariant_d(A, alpha).data)


@pytest.mark.parametrize("n,m", [(3, 2), (4, 2), (5, 2), (3, 3), (4, 3)])
def test_first_variation_matches_finite_differences(n, m):
    A = sample_form(m, 1, 8, 5, amplitude=0.4, n=max(n, 2))
    alpha = sample_form(m, 1, 8, 6, amplitude=0.4, n=max(n, 2))
    t = 1e-4

    def chain(B):
        return alternating_codiff(B, curvature(B), n - 2)

    fd = (chain(A + alpha * t) - chain(A - alpha * t)) / (2 * t)
    exact = first_variation_chain(A, alpha, n)
    assert lp_norm(exact - fd) / lp_norm(exact) < 1e-7


@pytest.mark.parametrize("kind,n", [("Yn", 2), ("Yn", 3), ("Zn", 3), ("YM", 2)])
def test_constant_gauge_invariance(kind, n):
    spec = FunctionalSpec(kind, n)
    A = sample_form(2, 1, 16, 8, amplitude=0.5)
    g = GaugeField.constant(A.grid, random_group_element(9, 1.0, 2))
    a, b = evaluate(spec, A), evaluate(spec, gauge_transform_connection(g, A))
    assert abs(a - b) <= 1e-12 * a


def test_el_residual_is_gradient_norm():
    spec = FunctionalSpec("Zn", 3)
    A = sample_form(2, 1, 8, 4)
    assert el_residual(spec, A) == pytest.approx(lp_norm(gradient(spec, A)), rel=1e-14)


def test_sobolev_profile():
    A = benchmark(32)
    prof2 = sobolev_profile(A, 2)
    assert len(prof2) == 1
    assert prof2[0] == pytest.approx(evaluate(FunctionalSpec("YM"), A) * 2, rel=1e-13)
    A3 = sample_form(2, 1, 16, 3, n=4)
    assert len(sobolev_profile(A3, 4)) == 3
    with pytest.raises(ValueError):
        sobolev_profile(A3, 1)
