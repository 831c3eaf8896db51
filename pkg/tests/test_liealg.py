import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaugeflow.liealg import (
    bracket,
    dagger,
    exp_map,
    inner,
    is_algebra,
    is_group,
    project_algebra,
    random_element,
    random_group_element,
    su_basis,
)

seeds = st.integers(0, 2**31 - 1)
sizes = st.sampled_from([2, 3])


@pytest.mark.parametrize("k", [2, 3, 4])
def test_basis_is_orthonormal(k):
    B = su_basis(k)
    assert len(B) == k * k - 1
    gram = np.array([[inner(a, b) for b in B] for a in B])
    np.testing.assert_allclose(gram, np.eye(k * k - 1), atol=1e-14)
    assert all(is_algebra(X) for X in B)


def test_su2_structure_constants():
    # basis elements close under the bracket with unit-size structure constants
    B = su_basis(2)
    C = bracket(B[0], B[1])
    coeffs = [inner(C, X) for X in B]
    np.testing.assert_allclose(np.abs(coeffs), [0, 0, np.sqrt(2)], atol=1e-14)


@given(seeds, seeds, sizes)
def test_bracket_antisymmetric_and_closed(s1, s2, k):
    X, Y = random_element(s1, 1.0, k), random_element(s2, 1.0, k)
    np.testing.assert_allclose(bracket(X, Y), -bracket(Y, X), atol=1e-14)
    assert is_algebra(bracket(X, Y))


@given(seeds, seeds, seeds, sizes)
def test_jacobi(s1, s2, s3, k):
    X, Y, Z = (random_element(s, 1.0, k) for s in (s1, s2, s3))
    total = bracket(X, bracket(Y, Z)) + bracket(Y, bracket(Z, X)) + bracket(Z, bracket(X, Y))
    assert np.abs(total).max() < 1e-13


@given(seeds, seeds, seeds, sizes)
def test_inner_is_ad_invariant(s1, s2, s3, k):
    X, Y, Z = (random_element(s, 1.0, k) for s in (s1, s2, s3))
    assert abs(inner(bracket(Z, X), Y) + inner(X, bracket(Z, Y))) < 1e-13
    g = random_group_element(s3, 1.0, k)
    Ad = lambda W: dagger(g) @ W @ g
    assert abs(inner(Ad(X), Ad(Y)) - inner(X, Y)) < 1e-12


@given(seeds, sizes, st.floats(0.0, 3.0))
@settings(max_examples=50)
def test_exp_lands_in_group(seed, k, scale):
    X = random_element(seed, scale, k)
    U = exp_map(X)
    assert is_group(U)
    np.testing.assert_allclose(exp_map(-X) @ U, np.eye(k), atol=1e-12)


def test_exp_matches_closed_form_for_su2():
    # exp(θ i σ_3) = diag(e^{iθ}, e^{-iθ})
    theta = 0.7
    X = np.diag([1j * theta, -1j * theta])
    np.testing.assert_allclose(exp_map(X), np.diag(np.exp([1j * theta, -1j * theta])), atol=1e-15)


def test_exp_field_shape():
    X = random_element(3, 0.5, 2, shape=(4, 5))
    assert exp_map(X).shape == (4, 5, 2, 2)


@given(seeds, sizes)
def test_projection_is_idempotent(seed, k):
    M = np.random.default_rng(seed).standard_normal((k, k, 2)).view(complex)[..., 0]
    P = project_algebra(M)
    assert is_algebra(P)
    np.testing.assert_allclose(project_algebra(P), P, atol=1e-14)


def test_bracket_rejects_mismatched_sizes():
    with pytest.raises(ValueError):
        bracket(np.zeros((2, 2)), np.zeros((3, 3)))
