"""Matrix Lie algebra su(k) and group SU(k) primitives.

Every function here acts on the trailing two axes, so a single call handles
one matrix or a whole field of them (shape ``(..., k, k)``).  The inner
product on the algebra is ``<X, Y> = -Re tr(XY)``.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "PAULI",
    "bracket",
    "inner",
    "frobenius",
    "dagger",
    "exp_map",
    "project_algebra",
    "random_element",
    "random_group_element",
    "su_basis",
    "is_algebra",
    "is_group",
]

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def _check_pair(X, Y):
    if X.shape[-2:] != Y.shape[-2:]:
        raise ValueError(f"matrix size mismatch: {X.shape[-2:]} vs {Y.shape[-2:]}")


def dagger(M):
    """Conjugate transpose over the trailing matrix axes."""
    return np.conj(np.swapaxes(M, -1, -2))


def bracket(X, Y):
    """Matrix commutator ``XY - YX``."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    _check_pair(X, Y)
    return X @ Y - Y @ X


def inner(X, Y):
    """Ad-invariant inner product ``-Re tr(XY)``; reduces only the matrix axes."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    _check_pair(X, Y)
    return -np.einsum("...ab,...ba->...", X, Y).real


def frobenius(X, Y):
    """Real Frobenius pairing ``Re tr(X^H Y)``; agrees with :func:`inner` on su(k)."""
    return np.einsum("...ab,...ab->...", np.conj(X), Y).real


def project_algebra(M):
    """Orthogonal projection of an arbitrary complex matrix onto su(k)."""
    M = np.asarray(M, dtype=complex)
    k = M.shape[-1]
    S = 0.5 * (M - dagger(M))
    tr = np.trace(S, axis1=-2, axis2=-1)
    return S - (tr / k)[..., None, None] * np.eye(k)


def exp_map(X, tol=1e-16):
    """Matrix exponential by scaling and squaring with a truncated Taylor series.

    The scaling exponent is shared across the whole batch and chosen so that
    the largest scaled norm is at most 1/2; 20 Taylor terms then leave a
    truncation error far below double precision.
    """
    X = np.asarray(X, dtype=complex)
    k = X.shape[-1]
    norm = float(np.max(np.linalg.norm(X, ord="fro", axis=(-2, -1)), initial=0.0))
    s = 0 if norm <= 0.5 else int(np.ceil(np.log2(norm / 0.5)))
    Y = X / (2.0**s)
    eye = np.broadcast_to(np.eye(k, dtype=complex), X.shape)
    result = eye.copy()
    term = eye.copy()
    for j in range(1, 30):
        term = term @ Y / j
        result = result + term
        if np.max(np.abs(term), initial=0.0) < tol:
            break
    for _ in range(s):
        result = result @ result
    return result


def su_basis(k):
    """Orthonormal basis of su(k) with respect to ``-Re tr(XY)``."""
    basis = []
    for a in range(k):
        for b in range(a + 1, k):
            E = np.zeros((k, k), dtype=complex)
            E[a, b], E[b, a] = 1.0, -1.0
            basis.append(E / np.sqrt(2.0))
            E = np.zeros((k, k), dtype=complex)
            E[a, b] = E[b, a] = 1j
            basis.append(E / np.sqrt(2.0))
    for d in range(1, k):
        D = np.zeros((k, k), dtype=complex)
        D[:d, :d] = np.eye(d)
        D[d, d] = -d
        basis.append(1j * D / np.sqrt(d * (d + 1)))
    return np.array(basis, dtype=complex).reshape(-1, k, k)


def random_element(seed, scale=1.0, k=2, shape=()):
    """Deterministic Gaussian element of su(k) with Frobenius norm of order ``scale``."""
    if scale < 0:
        raise ValueError("scale must be non-negative")
    rng = np.random.default_rng(seed)
    basis = su_basis(k)
    coeffs = rng.standard_normal(tuple(shape) + (len(basis),))
    if len(basis):
        coeffs /= np.sqrt(len(basis))
    return project_algebra(scale * np.tensordot(coeffs, basis, axes=(-1, 0)))


def random_group_element(seed, scale=1.0, k=2, shape=()):
    """``exp_map`` of a :func:`random_element`."""
    return exp_map(random_element(seed, scale, k, shape))


def is_algebra(X, atol=1e-12, traceless=True):
    X = np.asarray(X)
    ok = np.all(np.abs(X + dagger(X)) <= atol)
    if traceless:
        ok = ok and np.all(np.abs(np.trace(X, axis1=-2, axis2=-1)) <= atol)
    return bool(ok)


def is_group(U, atol=1e-10):
    U = np.asarray(U)
    k = U.shape[-1]
    unitary = np.all(np.abs(U @ dagger(U) - np.eye(k)) <= atol)
    det = np.all(np.abs(np.linalg.det(U) - 1.0) <= atol)
    return bool(unitary and det)
