"""Connections, curvature, gauge transformations and covariant derivatives.

A connection on the trivial torus bundle is a 1-form :class:`FormField`.
Gauge transformations act by ``u*A = u^{-1} A u + u^{-1} du``; the
derivative of ``u`` uses the same fourth-order stencil as every other
derivative in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from ._kernels import commutator, matmul
from .forms import (
    FormField,
    GridSpec,
    _position,
    index_sets,
    codifferential,
    ext_d,
    graded_bracket,
    hodge_star,
    partial,
    pointwise_norm_sq,
    wedge,
)
from .liealg import dagger, is_group, project_algebra

__all__ = [
    "GaugeField",
    "CovariantTensor",
    "as_connection",
    "curvature",
    "gauge_transform_connection",
    "conjugate_form",
    "covariant_d",
    "covariant_codiff",
    "alternating_codiff",
    "alternating_d",
    "full_covariant_derivative",
    "full_derivative_transpose",
    "iterated_full_derivative",
    "plain_derivative",
    "rough_laplacian",
    "weitzenbock_curvature_term",
]


def as_connection(A):
    if not isinstance(A, FormField) or A.degree != 1:
        raise TypeError("a connection is a 1-form FormField")
    return A


@dataclass(frozen=True, eq=False)
class GaugeField:
    """One group element per site; ``u`` has shape ``(*sites, k, k)``."""

    grid: GridSpec
    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex)
        object.__setattr__(self, "u", u)
        if u.ndim != self.grid.m + 2 or u.shape[-2:] != (self.grid.k, self.grid.k):
            raise ValueError(f"gauge field shape {u.shape} does not fit {self.grid}")

    @classmethod
    def identity(cls, grid, sites=None):
        sites = grid.shape if sites is None else tuple(sites)
        u = np.broadcast_to(np.eye(grid.k, dtype=complex), sites + (grid.k, grid.k)).copy()
        return cls(grid, u)

    @classmethod
    def constant(cls, grid, g, sites=None):
        sites = grid.shape if sites is None else tuple(sites)
        return cls(grid, np.broadcast_to(np.asarray(g, dtype=complex), sites + g.shape).copy())

    def inverse(self):
        return GaugeField(self.grid, dagger(self.u))

    def __matmul__(self, other):
        return GaugeField(self.grid, matmul(self.u, other.u))

    def check(self, atol=1e-10):
        if not is_group(self.u, atol=atol):
            raise ValueError("gauge field leaves SU(k)")
        return self


@dataclass(frozen=True, eq=False)
class CovariantTensor:
    """Section of ``⊗^r T*M ⊗ Λ^p T*M ⊗ g``.

    ``data`` has shape ``(m,)*slots + (C(m, degree),) + sites + (k, k)``;
    the leading ``slots`` axes hold the derivative directions, newest first.
    """

    grid: GridSpec
    slots: int
    data: np.ndarray
    degree: int = 2

    def __post_init__(self):
        m = self.grid.m
        data = np.asarray(self.data, dtype=complex)
        object.__setattr__(self, "data", data)
        expected = (m,) * self.slots + (comb(m, self.degree),)
        if data.shape[: self.slots + 1] != expected or data.ndim != self.slots + m + 3:
            raise ValueError(f"tensor data shape {data.shape} does not match slots={self.slots}")

    @classmethod
    def from_form(cls, B):
        return cls(B.grid, 0, B.data, B.degree)

    def like(self, data, slots=None):
        return CovariantTensor(self.grid, self.slots if slots is None else slots, data, self.degree)

    def pointwise_norm_sq(self):
        return pointwise_norm_sq(self.data, self.grid.m)

    def l2_norm_sq(self):
        return float(self.grid.volume_element * self.pointwise_norm_sq().sum())

    def lp_norm(self, p=2.0):
        mag = np.sqrt(np.maximum(self.pointwise_norm_sq(), 0.0))
        if np.isinf(p):
            return float(mag.max(initial=0.0))
        return float((self.grid.volume_element * np.sum(mag**p)) ** (1.0 / p))


def curvature(A):
    """``F_A = dA + A∧A``."""
    as_connection(A)
    return ext_d(A) + wedge(A, A)


def _inv_du(u, grid):
    """``u^{-1} ∂_j u`` for every axis j, stacked on a leading axis."""
    uinv = dagger(u)
    return np.stack([matmul(uinv, partial(u, j, grid.m, grid.h)) for j in range(grid.m)])


def gauge_transform_connection(u, A):
    """``u*A = u^{-1} A u + u^{-1} du``, projected back onto su(k)."""
    as_connection(A)
    if u.grid != A.grid or u.u.shape[:-2] != A.sites:
        raise ValueError("gauge field and connection live on different grids")
    uinv = dagger(u.u)
    data = matmul(matmul(uinv, A.data), u.u) + _inv_du(u.u, A.grid)
    if A.grid.k > 1:
        data = project_algebra(data)
    else:
        data = 0.5 * (data - np.conj(data))
    return A.like(data)


def conjugate_form(u, B):
    """Site-wise ``u^{-1} B u`` on every component; accepts forms and tensors."""
    if u.grid != B.grid:
        raise ValueError("gauge field and form live on different grids")
    return B.like(matmul(matmul(dagger(u.u), B.data), u.u))


def covariant_d(A, B):
    """``d_A B = dB + [A, B]``."""
    return ext_d(B) + graded_bracket(as_connection(A), B)


def covariant_codiff(A, B):
    """``d_A^* B = d^* B + s *[A, *B]`` with ``s = (-1)^{(p+1)m+1}``.

    ``s`` is the sign that makes ``d_A^*`` the exact adjoint of ``d_A`` on
    p-forms.  For 2-forms, or any form when m is even, it equals
    ``(-1)^{m+1}``.
    """
    as_connection(A)
    twist = hodge_star(graded_bracket(A, hodge_star(B)))
    return codifferential(B) + (twist if _codiff_sign(B.grid.m, B.degree) > 0 else -twist)


def _codiff_sign(m, p):
    return -1.0 if ((p + 1) * m + 1) % 2 else 1.0


def alternating_codiff(A, B, j):
    """Apply ``d_A^*, d_A, d_A^*, ...`` (``j`` operators, ``d_A^*`` first)."""
    if j < 0:
        raise ValueError("number of operators must be non-negative")
    out = B
    for i in range(j):
        out = covariant_codiff(A, out) if i % 2 == 0 else covariant_d(A, out)
    return out


def alternating_d(A, C, j):
    """Apply ``d_A, d_A^*, d_A, ...`` (``j`` operators, ``d_A`` first)."""
    if j < 0:
        raise ValueError("number of operators must be non-negative")
    out = C
    for i in range(j):
        out = covariant_d(A, out) if i % 2 == 0 else covariant_codiff(A, out)
    return out


def full_covariant_derivative(A, T):
    """``(D_A T)_{j,...} = ∂_j T_{...} + [A_j, T_{...}]`` (flat torus, no Christoffels)."""
    as_connection(A)
    if isinstance(T, FormField):
        T = CovariantTensor.from_form(T)
    if T.grid != A.grid:
        raise ValueError("tensor and connection live on different grids")
    m, h = A.grid.m, A.grid.h
    out = np.empty((m,) + T.data.shape, dtype=complex)
    for j in range(m):
        a = A.data[j]
        out[j] = partial(T.data, j, m, h)
        out[j] += commutator(a, T.data)
    return T.like(out, T.slots + 1)


def full_derivative_transpose(A, G):
    """Transpose of :func:`full_covariant_derivative` in its tensor argument."""
    m, h = A.grid.m, A.grid.h
    out = np.zeros(G.data.shape[1:], dtype=complex)
    for j in range(m):
        a, g = A.data[j], G.data[j]
        out -= partial(g, j, m, h)
        out -= commutator(a, g)
    return G.like(out, G.slots - 1)


def iterated_full_derivative(A, j):
    """``D_A^j F_A`` as a tensor with ``j`` derivative slots."""
    if j < 0:
        raise ValueError("derivative order must be non-negative")
    T = CovariantTensor.from_form(curvature(A))
    for _ in range(j):
        T = full_covariant_derivative(A, T)
    return T


def plain_derivative(T, order=1):
    """Tensor of ``order``-fold plain partial derivatives (no connection term)."""
    if isinstance(T, FormField):
        T = CovariantTensor.from_form(T)
    m, h = T.grid.m, T.grid.h
    for _ in range(order):
        T = T.like(np.stack([partial(T.data, j, m, h) for j in range(m)]), T.slots + 1)
    return T


def rough_laplacian(A, B):
    """``D_A^* D_A B`` with ``D_A^*`` the exact discrete adjoint."""
    DB = full_covariant_derivative(A, B)
    out = full_derivative_transpose(A, DB)
    return B.like(out.data)


def weitzenbock_curvature_term(A, B):
    """Curvature term of the flat-torus Weitzenböck formula.

    On the flat torus ``(d_A^* d_A + d_A d_A^*) B - D_A^* D_A B`` equals
    ``-Σ_{i,j} e^i ∧ ι_{e_j} [F_ij, B]``; this returns that right-hand side,
    a zeroth-order expression in ``B``.
    """
    F = curvature(A)
    m, p = B.grid.m, B.degree
    pos_p = _position(m, p)
    pos_2 = _position(m, 2)
    out = np.zeros_like(B.data)
    for idx, I in enumerate(index_sets(m, p)):
        for i in range(m):
            for j in range(m):
                if i == j or j not in I:
                    continue
                # ι_{e_j} removes j from I with sign (-1)^{slot of j}
                slot = I.index(j)
                J = I[:slot] + I[slot + 1:]
                if i in J:
                    continue
                s = -1 if slot % 2 else 1
                K = tuple(sorted(J + (i,)))
                s *= -1 if sum(1 for x in J if x < i) % 2 else 1
                f = F.data[pos_2[(min(i, j), max(i, j))]]
                if i > j:
                    f = -f
                comm = commutator(f, B.data[idx])
                out[pos_p[K]] -= s * comm
    return B.like(out)
