"""Lie-algebra valued differential forms on the periodic unit torus.

A p-form is stored as a complex array of shape ``(C(m, p), *sites, k, k)``:
one matrix per strictly increasing multi-index (lexicographic order) per
grid site.  Site axes always sit directly before the two matrix axes, so the
stencil helpers below also work on arrays carrying extra leading slots
(covariant tensors) or on row windows cut out of a larger grid.

Derivatives use the fourth-order central stencil with periodic wrap.  The
stencil is antisymmetric, hence the Hodge-star codifferential is the exact
adjoint of the exterior derivative under :func:`discrete_inner`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from ._kernels import commutator, matmul, periodic_stencil
from .liealg import is_algebra

__all__ = [
    "GridSpec",
    "FormField",
    "index_sets",
    "partial",
    "wedge",
    "graded_bracket",
    "hodge_star",
    "hodge_star_transpose",
    "ext_d",
    "ext_d_transpose",
    "codifferential",
    "discrete_inner",
    "pointwise_norm_sq",
    "lp_norm",
    "stencil_symbol",
]

# f(x+2h), f(x+h), f(x), f(x-h), f(x-2h)
STENCIL = np.array([-1.0, 8.0, 0.0, -8.0, 1.0]) / 12.0


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on the unit torus ``T^m``.

    ``k`` is the matrix size of the coefficients and ``n`` the order of the
    functionals that will be evaluated on this grid (``m <= 2n``).
    """

    m: int
    N: int
    k: int = 2
    n: int = 2

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"functional order n must be >= 2, got {self.n}")
        if not 2 <= self.m <= 2 * self.n:
            raise ValueError(f"dimension must satisfy 2 <= m <= 2n, got m={self.m}, n={self.n}")
        if self.N < 8 or self.N % 2:
            raise ValueError(f"N must be even and >= 8, got {self.N}")
        if self.k < 1:
            raise ValueError(f"matrix size k must be >= 1, got {self.k}")

    @property
    def h(self):
        return 1.0 / self.N

    @property
    def shape(self):
        return (self.N,) * self.m

    @property
    def volume_element(self):
        return self.h**self.m

    def coords(self, window=None):
        """Open-mesh coordinate arrays, optionally restricted to a window.

        ``window`` is ``None`` (whole grid), an index array for axis 0, or a
        tuple of index arrays for the leading axes.
        """
        x = np.arange(self.N) * self.h
        idx = _window_index(window)
        axes = [x[idx[i] % self.N] if i < len(idx) else x for i in range(self.m)]
        return np.meshgrid(*axes, indexing="ij", sparse=True)

    def window_shape(self, window=None):
        idx = _window_index(window)
        return tuple(len(idx[i]) if i < len(idx) else self.N for i in range(self.m))

    def with_(self, **changes):
        fields = dict(m=self.m, N=self.N, k=self.k, n=self.n)
        fields.update(changes)
        return GridSpec(**fields)


def _window_index(window):
    if window is None:
        return ()
    if isinstance(window, tuple):
        return tuple(np.asarray(w, dtype=int) for w in window)
    return (np.asarray(window, dtype=int),)


@lru_cache(maxsize=None)
def index_sets(m, p):
    """Strictly increasing multi-indices of length ``p`` over ``0..m-1``."""
    return tuple(combinations(range(m), p))


@lru_cache(maxsize=None)
def _position(m, p):
    return {I: i for i, I in enumerate(index_sets(m, p))}


def _perm_sign(seq):
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@lru_cache(maxsize=None)
def _wedge_table(m, p, q):
    """For each K of length p+q: tuples (i, j, sign) with I ∪ J = K."""
    pos_p, pos_q = _position(m, p), _position(m, q)
    table = []
    for K in index_sets(m, p + q):
        terms = []
        for I in combinations(K, p):
            J = tuple(x for x in K if x not in I)
            terms.append((pos_p[I], pos_q[J], _perm_sign(I + J)))
        table.append(tuple(terms))
    return tuple(table)


@lru_cache(maxsize=None)
def _star_table(m, p):
    """For each p-index I: (position of complement in (m-p)-forms, sign of (I, I^c))."""
    pos_c = _position(m, m - p)
    out = []
    for I in index_sets(m, p):
        Ic = tuple(x for x in range(m) if x not in I)
        out.append((pos_c[Ic], _perm_sign(I + Ic)))
    return tuple(out)


@lru_cache(maxsize=None)
def _d_table(m, p):
    """For each K of length p+1: tuples (axis j, position of K without j, sign)."""
    pos = _position(m, p)
    table = []
    for K in index_sets(m, p + 1):
        terms = []
        for slot, j in enumerate(K):
            I = K[:slot] + K[slot + 1:]
            terms.append((j, pos[I], -1 if slot % 2 else 1))
        table.append(tuple(terms))
    return tuple(table)


@dataclass(frozen=True, eq=False)
class FormField:
    """A ``g``-valued ``degree``-form sampled on ``grid``.

    ``data`` has shape ``(C(m, degree), *sites, k, k)``.  The site block is
    normally the full grid; windows used for out-of-core evaluation may carry
    fewer sites along the leading axes.
    """

    grid: GridSpec
    degree: int
    data: np.ndarray

    def __post_init__(self):
        m, k = self.grid.m, self.grid.k
        if not 0 <= self.degree <= m:
            raise ValueError(f"degree {self.degree} outside [0, {m}]")
        data = np.asarray(self.data, dtype=complex)
        object.__setattr__(self, "data", data)
        if data.ndim != m + 3:
            raise ValueError(f"expected {m + 3}-dimensional data, got shape {data.shape}")
        if data.shape[0] != comb(m, self.degree):
            raise ValueError(
                f"{self.degree}-form on T^{m} needs {comb(m, self.degree)} components, "
                f"got {data.shape[0]}"
            )
        if data.shape[-2:] != (k, k):
            raise ValueError(f"coefficients must be {k}x{k}, got {data.shape[-2:]}")

    @classmethod
    def zeros(cls, grid, degree, sites=None):
        sites = grid.shape if sites is None else tuple(sites)
        shape = (comb(grid.m, degree),) + sites + (grid.k, grid.k)
        return cls(grid, degree, np.zeros(shape, dtype=complex))

    @classmethod
    def constant(cls, grid, degree, values):
        """Spatially constant form; ``values`` has shape ``(C(m, degree), k, k)``."""
        values = np.asarray(values, dtype=complex)
        data = np.broadcast_to(
            values.reshape((values.shape[0],) + (1,) * grid.m + values.shape[-2:]),
            (values.shape[0],) + grid.shape + values.shape[-2:],
        ).copy()
        return cls(grid, degree, data)

    @property
    def sites(self):
        return self.data.shape[1:-2]

    @property
    def components(self):
        return index_sets(self.grid.m, self.degree)

    def component(self, I):
        """Coefficient field for the increasing multi-index ``I`` (0-based axes)."""
        return self.data[_position(self.grid.m, self.degree)[tuple(I)]]

    def like(self, data, degree=None):
        return FormField(self.grid, self.degree if degree is None else degree, data)

    def check(self, atol=1e-12, traceless=True):
        """Raise if some coefficient is not anti-Hermitian (and traceless)."""
        if not is_algebra(self.data, atol=atol, traceless=traceless):
            raise ValueError("coefficients are not in the Lie algebra")
        return self

    def _same(self, other):
        if not isinstance(other, FormField):
            return NotImplemented
        _check_compatible(self, other)
        if self.degree != other.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")
        return other

    def __add__(self, other):
        if self._same(other) is NotImplemented:
            return NotImplemented
        return self.like(self.data + other.data)

    def __sub__(self, other):
        if self._same(other) is NotImplemented:
            return NotImplemented
        return self.like(self.data - other.data)

    def __neg__(self):
        return self.like(-self.data)

    def __mul__(self, c):
        return self.like(self.data * c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self.like(self.data / c)


def _check_compatible(B, C):
    if B.grid != C.grid:
        raise ValueError(f"grid mismatch: {B.grid} vs {C.grid}")
    if B.data.shape[1:] != C.data.shape[1:]:
        raise ValueError(f"site/matrix shape mismatch: {B.data.shape[1:]} vs {C.data.shape[1:]}")


def _site_axis(j, m):
    return j - m - 2


def partial(a, j, m, h):
    """Fourth-order periodic central difference along site axis ``j``.

    ``a`` may carry any number of leading axes; the last ``m + 2`` axes must be
    ``(*sites, k, k)``.
    """
    a = np.ascontiguousarray(a, dtype=complex)
    ax = a.ndim + _site_axis(j, m)
    n = a.shape[ax]
    pre = int(np.prod(a.shape[:ax], dtype=np.int64))
    view = a.reshape(pre, n, -1)
    return periodic_stencil(view, 1.0 / (12.0 * h)).reshape(a.shape)


def stencil_symbol(theta, h):
    """Real symbol ``s`` of the stencil: it acts on ``exp(i theta x/h)`` as ``i*s``."""
    return (8.0 * np.sin(theta) - np.sin(2.0 * theta)) / (6.0 * h)


def wedge(B, C):
    """Wedge product with matrix multiplication of the coefficients."""
    _check_compatible(B, C)
    m, p, q = B.grid.m, B.degree, C.degree
    if p + q > m:
        raise ValueError(f"degree overflow: {p} + {q} > {m}")
    out = np.zeros((comb(m, p + q),) + B.data.shape[1:], dtype=complex)
    for c, terms in enumerate(_wedge_table(m, p, q)):
        for i, j, s in terms:
            prod = matmul(B.data[i], C.data[j])
            if s > 0:
                out[c] += prod
            else:
                out[c] -= prod
    return FormField(B.grid, p + q, out)


def graded_bracket(B, C):
    """``[B, C] = B∧C - (-1)^{pq} C∧B``.

    Collecting the two wedges term by term gives a signed sum of plain
    commutators ``sign(I, J) [B_I, C_J]``, which is what is evaluated.
    """
    _check_compatible(B, C)
    m, p, q = B.grid.m, B.degree, C.degree
    if p + q > m:
        raise ValueError(f"degree overflow: {p} + {q} > {m}")
    out = np.zeros((comb(m, p + q),) + B.data.shape[1:], dtype=complex)
    for c, terms in enumerate(_wedge_table(m, p, q)):
        for i, j, s in terms:
            comm = commutator(B.data[i], C.data[j])
            if s > 0:
                out[c] += comm
            else:
                out[c] -= comm
    return FormField(B.grid, p + q, out)


def hodge_star(B):
    """Flat Hodge star for the orientation ``dx^1 ∧ ... ∧ dx^m``."""
    m, p = B.grid.m, B.degree
    out = np.empty_like(B.data)
    for i, (ic, s) in enumerate(_star_table(m, p)):
        out[ic] = B.data[i] if s > 0 else -B.data[i]
    return FormField(B.grid, m - p, out)


def hodge_star_transpose(G):
    """Transpose of :func:`hodge_star` (maps a (m-p)-form back to a p-form)."""
    m, q = G.grid.m, G.degree
    p = m - q
    out = np.empty_like(G.data)
    for i, (ic, s) in enumerate(_star_table(m, p)):
        out[i] = G.data[ic] if s > 0 else -G.data[ic]
    return FormField(G.grid, p, out)


def ext_d(B):
    """Exterior derivative ``(dB)_K = Σ_{j∈K} ± ∂_j B_{K∖j}``."""
    m, p = B.grid.m, B.degree
    if p >= m:
        raise ValueError(f"cannot differentiate a {p}-form on T^{m}")
    h = B.grid.h
    out = np.zeros((comb(m, p + 1),) + B.data.shape[1:], dtype=complex)
    derivs = {}
    for c, terms in enumerate(_d_table(m, p)):
        for j, i, s in terms:
            key = (j, i)
            if key not in derivs:
                derivs[key] = partial(B.data[i], j, m, h)
            if s > 0:
                out[c] += derivs[key]
            else:
                out[c] -= derivs[key]
    return FormField(B.grid, p + 1, out)


def ext_d_transpose(G):
    """Transpose of :func:`ext_d` under :func:`discrete_inner`, built from ∂ᵀ = -∂."""
    m, q = G.grid.m, G.degree
    if q < 1:
        raise ValueError("cannot transpose d onto a (-1)-form")
    h = G.grid.h
    out = np.zeros((comb(m, q - 1),) + G.data.shape[1:], dtype=complex)
    for c, terms in enumerate(_d_table(m, q - 1)):
        for j, i, s in terms:
            dG = partial(G.data[c], j, m, h)
            if s > 0:
                out[i] -= dG
            else:
                out[i] += dG
    return FormField(G.grid, q - 1, out)


def codifferential(B):
    """``d* = (-1)^{(p+1)m+1} * d *`` on p-forms."""
    m, p = B.grid.m, B.degree
    if p < 1:
        raise ValueError("codifferential of a 0-form is undefined")
    out = hodge_star(ext_d(hodge_star(B)))
    return -out if ((p + 1) * m + 1) % 2 else out


def pointwise_norm_sq(data, m):
    """Site array ``Σ <X, X>`` summed over every axis before the last ``m + 2``."""
    v = -np.einsum("...ab,...ba->...", data, data).real
    lead = v.ndim - m
    return v.sum(axis=tuple(range(lead))) if lead else v


def discrete_inner(B, C):
    """``h^m Σ_sites Σ_I <B_I, C_I>``."""
    _check_compatible(B, C)
    if B.degree != C.degree:
        raise ValueError(f"degree mismatch: {B.degree} vs {C.degree}")
    return -B.grid.volume_element * float(np.einsum("...ab,...ba->...", B.data, C.data).real.sum())


def lp_norm(B, p=2.0):
    """``(h^m Σ_sites |B(x)|^p)^{1/p}``; ``p = inf`` gives the max norm."""
    if p < 1:
        raise ValueError(f"L^p norm needs p >= 1, got {p}")
    mag = np.sqrt(np.maximum(pointwise_norm_sq(B.data, B.grid.m), 0.0))
    if np.isinf(p):
        return float(mag.max(initial=0.0))
    return float((B.grid.volume_element * np.sum(mag**p)) ** (1.0 / p))
