"""Gauge-invariant functionals, their first variation and exact gradients.

Four functionals are available through :class:`FunctionalSpec`::

    YM   = 1/2 ||F||^2
    YMn  = 1/n Σ h^m |F|^n
    Yn   = ||d_A^{*∧(n-2)} F||^2 + Σ h^m |F|^n
    Zn   = ||D_A^{n-2} F||^2 + ||F||^2

Gradients are assembled by reverse accumulation through the same operator
pipeline that evaluates the functional.  Every transpose used there is the
exact transpose of the discrete operator, so the gradient pairs with any
direction exactly (up to rounding), which is the discrete Euler-Lagrange
condition.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from ._kernels import commutator
from .connection import (
    _codiff_sign,
    CovariantTensor,
    alternating_codiff,
    alternating_d,
    as_connection,
    covariant_codiff,
    covariant_d,
    curvature,
    full_covariant_derivative,
    full_derivative_transpose,
    iterated_full_derivative,
)
from .forms import (
    FormField,
    _wedge_table,
    discrete_inner,
    ext_d_transpose,
    graded_bracket,
    hodge_star,
    hodge_star_transpose,
    lp_norm,
    pointwise_norm_sq,
)

__all__ = [
    "KINDS",
    "FunctionalSpec",
    "GradientReport",
    "evaluate",
    "density",
    "first_variation_chain",
    "gradient",
    "gradient_report",
    "el_residual",
    "sobolev_profile",
    "sobolev_densities",
]

KINDS = ("YM", "YMn", "Yn", "Zn")


@dataclass(frozen=True)
class FunctionalSpec:
    kind: str
    n: int = 2

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown functional kind {self.kind!r}; choose from {KINDS}")
        if self.n < 2:
            raise ValueError(f"functional order must be >= 2, got {self.n}")

    def check_grid(self, grid):
        if grid.m > 2 * self.n:
            raise ValueError(f"dimension m={grid.m} exceeds 2n={2 * self.n}")

    def __str__(self):
        return f"{self.kind}(n={self.n})"


@dataclass
class GradientReport:
    value: float
    gradient: FormField
    fd_error: float


def _abs_pow(F, p):
    """Site array ``|F(x)|^p``."""
    sq = np.maximum(pointwise_norm_sq(F.data, F.grid.m), 0.0)
    return sq if p == 2 else sq ** (p / 2.0)


def density(spec, A):
    """Site array whose Riemann sum ``h^m Σ`` is the functional value."""
    as_connection(A)
    spec.check_grid(A.grid)
    F = curvature(A)
    m, n = A.grid.m, spec.n
    if spec.kind == "YM":
        return 0.5 * _abs_pow(F, 2)
    if spec.kind == "YMn":
        return _abs_pow(F, n) / n
    if spec.kind == "Yn":
        X = alternating_codiff(A, F, n - 2)
        return pointwise_norm_sq(X.data, m) + _abs_pow(F, n)
    T = iterated_full_derivative(A, n - 2)
    return T.pointwise_norm_sq() + _abs_pow(F, 2)


def evaluate(spec, A):
    """Value of the functional ``spec`` at the connection ``A``."""
    return float(A.grid.volume_element * np.sum(density(spec, A)))


def first_variation_chain(A, alpha, n):
    """Derivative of ``d_{A+tα}^{*∧(n-2)} F_{A+tα}`` at ``t = 0``.

    Evaluates the closed expression ``d_A^{∧(n-1)} α`` plus the two bracket
    sums, each term pushed through the remaining alternating operators.
    """
    as_connection(A)
    as_connection(alpha)
    if n < 2:
        raise ValueError("n must be >= 2")
    m = A.grid.m
    F = curvature(A)
    out = alternating_d(A, alpha, n - 1)
    for k in range((n - 3) // 2 + 1) if n >= 3 else ():
        X = alternating_codiff(A, F, 2 * k)
        term = hodge_star(graded_bracket(alpha, hodge_star(X)))
        term = alternating_d(A, term, n - 3 - 2 * k)
        out = out + term if m % 2 else out - term
    for k in range((n - 4) // 2 + 1) if n >= 4 else ():
        X = alternating_codiff(A, F, 2 * k + 1)
        term = alternating_codiff(A, graded_bracket(alpha, X), n - 4 - 2 * k)
        out = out + term
    return out


# -- reverse accumulation -------------------------------------------------


def _bracket_transpose_form(A, G, p):
    """Transpose of ``X ↦ [A, X]`` (``A`` a 1-form, ``X`` a p-form)."""
    m = A.grid.m
    out = np.zeros((comb(m, p),) + G.data.shape[1:], dtype=complex)
    for c, terms in enumerate(_wedge_table(m, 1, p)):
        g = G.data[c]
        for j, i, s in terms:
            a = A.data[j]
            comm = commutator(a, g)
            if s > 0:
                out[i] -= comm
            else:
                out[i] += comm
    return FormField(A.grid, p, out)


def _bracket_transpose_connection(X, G):
    """Transpose of ``δA ↦ [δA, X]`` for fixed p-form ``X``."""
    m, p = X.grid.m, X.degree
    out = np.zeros((m,) + G.data.shape[1:], dtype=complex)
    for c, terms in enumerate(_wedge_table(m, 1, p)):
        g = G.data[c]
        for j, i, s in terms:
            x = X.data[i]
            comm = commutator(x, g)
            if s > 0:
                out[j] += comm
            else:
                out[j] -= comm
    return FormField(X.grid, 1, out)


def _pull_covariant_d(A, X, G):
    """Cotangents of ``Y = d_A X`` with respect to ``X`` and ``A``."""
    gX = ext_d_transpose(G) + _bracket_transpose_form(A, G, X.degree)
    gA = _bracket_transpose_connection(X, G)
    return gX, gA


def _pull_covariant_codiff(A, X, G):
    """Cotangents of ``Y = d^* X + c *[A, *X]``, ``c = (-1)^{(p+1)m+1}``."""
    # d^* = c * d *, so its transpose is c *^T d^T *^T
    c = sign = _codiff_sign(A.grid.m, X.degree)
    gX = hodge_star_transpose(ext_d_transpose(hodge_star_transpose(G))) * c
    Gs = hodge_star_transpose(G)
    starX = hodge_star(X)
    gX = gX + hodge_star_transpose(_bracket_transpose_form(A, Gs, starX.degree)) * sign
    gA = _bracket_transpose_connection(starX, Gs) * sign
    return gX, gA


def _pull_curvature(A, G):
    """Cotangent of ``F = dA + A∧A`` with respect to ``A``."""
    return ext_d_transpose(G) + _bracket_transpose_form(A, G, 1)


def _power_cotangent(F, n):
    """Cotangent of ``Σ h^m |F|^n``: ``n |F|^{n-2} F`` (continuous at F = 0 for n >= 2)."""
    w = _abs_pow(F, n - 2) if n != 2 else 1.0
    return F * n if n == 2 else F.like(F.data * (n * w)[None, ..., None, None])


def gradient(spec, A):
    """Exact gradient: ``discrete_inner(gradient, α) = d/dt evaluate(A + tα)``."""
    as_connection(A)
    spec.check_grid(A.grid)
    n = spec.n
    F = curvature(A)
    if spec.kind == "YM":
        return _pull_curvature(A, F)
    if spec.kind == "YMn":
        return _pull_curvature(A, _power_cotangent(F, n) / n)
    gA = FormField.zeros(A.grid, 1, A.sites)
    if spec.kind == "Yn":
        chain = [F]
        for i in range(n - 2):
            op = covariant_codiff if i % 2 == 0 else covariant_d
            chain.append(op(A, chain[-1]))
        G = chain[-1] * 2.0
        for i in reversed(range(n - 2)):
            pull = _pull_covariant_codiff if i % 2 == 0 else _pull_covariant_d
            G, dA = pull(A, chain[i], G)
            gA = gA + dA
        GF = G + _power_cotangent(F, n)
    else:
        chain = [CovariantTensor.from_form(F)]
        for _ in range(n - 2):
            chain.append(full_covariant_derivative(A, chain[-1]))
        G = chain[-1].like(chain[-1].data * 2.0)
        for r in reversed(range(n - 2)):
            T = chain[r]
            m = A.grid.m
            extra = np.zeros_like(A.data)
            for j in range(m):
                g = G.data[j]
                comm = commutator(T.data, g)
                extra[j] = comm.reshape((-1,) + comm.shape[T.slots + 1:]).sum(axis=0)
            gA = gA + A.like(extra)
            G = full_derivative_transpose(A, G)
        GF = F.like(G.data) + F * 2.0
    return gA + _pull_curvature(A, GF)


def gradient_report(spec, A, directions, t=1e-4):
    """Value, gradient and the worst relative mismatch against central differences."""
    G = gradient(spec, A)
    value = evaluate(spec, A)
    worst = 0.0
    for alpha in directions:
        fd = (evaluate(spec, A + alpha * t) - evaluate(spec, A - alpha * t)) / (2.0 * t)
        pair = discrete_inner(G, alpha)
        scale = max(abs(fd), abs(pair))
        if scale > 0.0:
            worst = max(worst, abs(pair - fd) / scale)
    return GradientReport(value, G, worst)


def el_residual(spec, A):
    """``||gradient||_{L^2}``; zero exactly at discrete critical points."""
    return lp_norm(gradient(spec, A), 2)


def sobolev_densities(A, n):
    """Site arrays ``|D_A^k F|^{2n/(k+2)}`` for ``k = 0..n-2``."""
    as_connection(A)
    T = CovariantTensor.from_form(curvature(A))
    out = []
    for k in range(n - 1):
        p = 2.0 * n / (k + 2)
        sq = np.maximum(T.pointwise_norm_sq(), 0.0)
        out.append(sq ** (p / 2.0))
        if k < n - 2:
            T = full_covariant_derivative(A, T)
    return out


def sobolev_profile(A, n):
    """``[||D_A^k F||_{L^p}^p for p = 2n/(k+2), k = 0..n-2]``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    dv = A.grid.volume_element
    return [float(dv * np.sum(d)) for d in sobolev_densities(A, n)]
