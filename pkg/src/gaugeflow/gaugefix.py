"""Coulomb gauge fixing by descent on the gauge orbit.

For a connection ``A`` the orbit energy ``E(u) = ||u*A||^2`` is minimised
over gauge fields ``u``.  Perturbing ``u -> u exp(t ξ)`` changes ``E`` by
``t <grad, ξ>`` with

    grad = P Σ_j ([G_j, B_j] - G_j W_j^H - u^{-1} ∂_j(u G_j)),

where ``G = 2 u*A``, ``B_j = u^{-1} A_j u``, ``W_j = u^{-1} ∂_j u`` and ``P``
projects onto the Lie algebra.  This is the exact derivative of the
discrete energy; in the continuum it reduces to ``2 d^*(u*A)``, so critical
points are in Coulomb gauge.  Steps ``u <- u exp(-τ p)`` use Armijo
backtracking, with ``p`` the gradient or its Fourier-preconditioned version
(the inverse of the Hessian at the flat connection).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ._kernels import commutator, matmul
from .connection import (
    GaugeField,
    as_connection,
    curvature,
    gauge_transform_connection,
    iterated_full_derivative,
    plain_derivative,
)
from .forms import codifferential, discrete_inner, lp_norm, partial, stencil_symbol
from .liealg import dagger, exp_map, project_algebra

__all__ = [
    "GaugeFixResult",
    "coulomb_residual",
    "orbit_energy",
    "orbit_gradient",
    "fix_coulomb",
    "uhlenbeck_report",
    "UhlenbeckReport",
    "HISTORY_COLUMNS",
]

HISTORY_COLUMNS = ("iter", "energy", "coulomb_residual", "step_size")

ARMIJO_C = 1e-4
SHRINK = 0.5
MAX_BACKTRACK = 60
STALL = 1e-13  # relative energy decrease treated as no progress


@dataclass
class GaugeFixResult:
    u: GaugeField
    omega: object
    residual: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list)


def coulomb_residual(A):
    """``||d^* A||_{L^2}``."""
    return lp_norm(codifferential(as_connection(A)), 2)


def orbit_energy(u, A):
    """``E(u) = ||u*A||^2``."""
    omega = gauge_transform_connection(u, A)
    return discrete_inner(omega, omega)


def _project(X, k):
    return project_algebra(X) if k > 1 else 0.5 * (X - np.conj(X))


def orbit_gradient(u, A, omega=None):
    """Exact gradient of :func:`orbit_energy` with respect to ``ξ`` in ``u exp(ξ)``.

    Returned as an algebra-valued site array of shape ``(*sites, k, k)``.
    """
    grid = A.grid
    m, h, k = grid.m, grid.h, grid.k
    if omega is None:
        omega = gauge_transform_connection(u, A)
    uinv = dagger(u.u)
    out = np.zeros_like(u.u)
    for j in range(m):
        G = 2.0 * omega.data[j]
        B = matmul(matmul(uinv, A.data[j]), u.u)
        W = matmul(uinv, partial(u.u, j, m, h))
        out += commutator(G, B)
        out -= matmul(G, dagger(W))
        out -= matmul(uinv, partial(matmul(u.u, G), j, m, h))
    return _project(out, k)


def _preconditioner(grid, sites):
    """Fourier multiplier ``1 / (2 max(λ(θ), λ_1))`` with ``λ`` the stencil Laplacian symbol."""
    h = grid.h
    lam = 0.0
    for axis, n in enumerate(sites):
        theta = 2.0 * np.pi * np.fft.fftfreq(n)
        s = stencil_symbol(theta, h) ** 2
        shape = [1] * len(sites)
        shape[axis] = n
        lam = lam + s.reshape(shape)
    lam1 = stencil_symbol(2.0 * np.pi / grid.N, h) ** 2
    return 1.0 / (2.0 * np.maximum(lam, lam1))


def _apply_preconditioner(g, M, k):
    m = M.ndim
    axes = tuple(range(m))
    out = np.fft.ifftn(np.fft.fftn(g, axes=axes) * M[..., None, None], axes=axes)
    return _project(out, k)


def fix_coulomb(A, tol=1e-8, max_iter=500, precondition=True, kappa=0.1, n=None):
    """Drive ``u*A`` towards Coulomb gauge by Armijo descent on the orbit energy.

    Stops once ``coulomb_residual(u*A) <= tol``.  Accepted steps never raise
    the energy.  If the energy stops decreasing (the discrete critical point
    has been reached, which for generic fields sits an O(h^4) distance from
    exact Coulomb gauge) the loop ends early and ``converged`` reflects the
    residual test alone.  ``kappa`` is the curvature smallness
    threshold; exceeding it only triggers a warning.
    """
    as_connection(A)
    if tol <= 0:
        raise ValueError("tol must be positive")
    grid = A.grid
    n = grid.n if n is None else n
    if kappa is not None:
        size = lp_norm(curvature(A), n)
        if size >= kappa:
            warnings.warn(
                f"||F_A||_L^{n} = {size:.3g} exceeds the smallness threshold {kappa}; "
                "Coulomb gauge may not exist", RuntimeWarning, stacklevel=2)
    u = GaugeField.identity(grid, A.sites)
    omega = gauge_transform_connection(u, A)
    energy = discrete_inner(omega, omega)
    residual = coulomb_residual(omega)
    history = [(0, energy, residual, 0.0)]
    M = _preconditioner(grid, A.sites) if precondition else None
    step = 1.0
    it = 0
    while residual > tol and it < max_iter:
        g = orbit_gradient(u, A, omega)
        p = _apply_preconditioner(g, M, grid.k) if precondition else g
        slope = grid.volume_element * float(np.sum(-np.einsum("...ab,...ba->...", g, p).real))
        if not slope > 0.0:
            break
        tau = 1.0
        accepted = False
        for _ in range(MAX_BACKTRACK):
            trial = GaugeField(grid, matmul(u.u, exp_map(-tau * p)))
            trial_omega = gauge_transform_connection(trial, A)
            trial_energy = discrete_inner(trial_omega, trial_omega)
            if trial_energy <= energy - ARMIJO_C * tau * slope:
                accepted = True
                break
            tau *= SHRINK
        if not accepted:
            break
        it += 1
        stalled = energy - trial_energy <= STALL * energy
        u, omega, energy, step = trial, trial_omega, trial_energy, tau
        residual = coulomb_residual(omega)
        history.append((it, energy, residual, step))
        if stalled:
            break
    return GaugeFixResult(u, omega, residual, it, residual <= tol, history)


@dataclass
class UhlenbeckReport:
    lhs: float
    rhs: float
    ratio: float
    lhs_terms: list
    n: int


def uhlenbeck_report(result, n):
    """Compare ``Σ_l ||D^l Ω||_{L^{2n/(l+1)}}`` with ``||D_Ω^{n-2} F_Ω||_2 + ||F_Ω||_n``.

    Plain derivatives are used on the left and the whole torus replaces the
    ball.  The ratio is reported as 0 when both sides vanish.
    """
    if not result.converged:
        raise ValueError("uhlenbeck_report needs a converged gauge-fixing result")
    if n < 2:
        raise ValueError("n must be >= 2")
    omega = result.omega
    terms = []
    T = omega
    for ell in range(n):
        if ell:
            T = plain_derivative(T, 1)
            terms.append(T.lp_norm(2.0 * n / (ell + 1)))
        else:
            terms.append(lp_norm(omega, 2.0 * n))
    lhs = float(sum(terms))
    rhs = iterated_full_derivative(omega, n - 2).lp_norm(2.0) + lp_norm(curvature(omega), n)
    ratio = 0.0 if lhs == 0.0 and rhs == 0.0 else (np.inf if rhs == 0.0 else lhs / rhs)
    return UhlenbeckReport(lhs, float(rhs), float(ratio), terms, n)
