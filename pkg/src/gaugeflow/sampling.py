"""Deterministic band-limited test fields.

Fields are described in the continuum (a short list of Fourier modes with
su(k) coefficients) and sampled on demand, so the same seed gives the same
continuum field on every grid.  That is what makes refinement studies
meaningful.  Sampling can be restricted to a window of the grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .connection import GaugeField
from .forms import FormField
from .liealg import exp_map, random_element, su_basis

__all__ = [
    "BandLimitedForm",
    "BandLimitedGauge",
    "random_form",
    "random_connection",
    "random_gauge",
    "abelian_benchmark",
]


@dataclass(frozen=True)
class BandLimitedForm:
    """``Σ X_r cos(2π q_r·x + φ_r)`` per component, as a continuum object."""

    m: int
    degree: int
    k: int
    modes: tuple  # (component, q, phase, matrix)

    def sample(self, grid, window=None):
        if (grid.m, grid.k) != (self.m, self.k):
            raise ValueError(f"field for m={self.m}, k={self.k} sampled on {grid}")
        x = grid.coords(window)
        sites = grid.window_shape(window)
        k = self.k
        n_sites = int(np.prod(sites))
        data = np.zeros((comb(self.m, self.degree), n_sites, k * k), dtype=complex)
        flat = data.view(float)  # interleaved (re, im) pairs
        for comp in range(data.shape[0]):
            modes = [mode for mode in self.modes if mode[0] == comp]
            if not modes:
                continue
            waves = np.empty((len(modes), n_sites))
            coef = np.empty((len(modes), k * k), dtype=complex)
            for r, (_, q, phase, X) in enumerate(modes):
                # separable phase factors: one complex product per site
                wave = np.exp(1j * phase)
                for qi, xi in zip(q, x):
                    if qi:
                        wave = wave * np.exp(2j * np.pi * qi * xi)
                waves[r] = np.broadcast_to(wave.real, sites).reshape(-1)
                coef[r] = X.reshape(-1)
            np.matmul(waves.T, coef.view(float), out=flat[comp])
        data = data.reshape((data.shape[0],) + sites + (k, k))
        return FormField(grid, self.degree, data)

    def scaled(self, c):
        return BandLimitedForm(self.m, self.degree, self.k,
                               tuple((i, q, ph, c * X) for i, q, ph, X in self.modes))


@dataclass(frozen=True)
class BandLimitedGauge:
    """``u = exp(ξ)`` for a band-limited algebra-valued 0-form ``ξ``."""

    xi: BandLimitedForm

    def sample(self, grid, window=None):
        return GaugeField(grid, exp_map(self.xi.sample(grid, window).data[0]))


def _generator(k):
    if k == 1:
        return np.array([[1j]])
    return su_basis(k)[-1]


def random_form(m, degree, k, seed, amplitude=0.1, band_limit=2, n_modes=3,
                constant=True, abelian=False):
    """Seeded band-limited ``degree``-form with coefficient size ``O(amplitude)``.

    Each component receives ``n_modes`` random wave vectors with entries in
    ``[-band_limit, band_limit]`` plus, if ``constant``, a constant mode.
    ``abelian`` restricts all coefficients to multiples of one generator.
    """
    if band_limit < 1:
        raise ValueError("band_limit must be >= 1")
    rng = np.random.default_rng(seed)
    norm = 1.0 / np.sqrt(n_modes + (1 if constant else 0))
    gen = _generator(k)
    modes = []
    for comp in range(comb(m, degree)):
        waves = []
        if constant:
            waves.append(((0,) * m, 0.0))
        while len(waves) < n_modes + (1 if constant else 0):
            q = tuple(int(v) for v in rng.integers(-band_limit, band_limit + 1, size=m))
            if any(q):
                waves.append((q, float(rng.uniform(0.0, 2.0 * np.pi))))
        for q, phase in waves:
            if abelian or k == 1:
                X = rng.standard_normal() * gen
            else:
                X = random_element(int(rng.integers(2**31)), 1.0, k)
            modes.append((comp, q, phase, amplitude * norm * X))
    return BandLimitedForm(m, degree, k, tuple(modes))


def random_connection(grid, seed, amplitude=0.1, band_limit=2, **kwargs):
    """Sample a seeded band-limited connection directly on ``grid``."""
    return random_form(grid.m, 1, grid.k, seed, amplitude, band_limit, **kwargs).sample(grid)


def random_gauge(m, k, seed, amplitude=0.3, band_limit=1, n_modes=3):
    """Seeded smooth gauge transformation ``exp(ξ)``."""
    return BandLimitedGauge(random_form(m, 0, k, seed, amplitude, band_limit, n_modes))


def abelian_benchmark(m=2, k=2):
    """``A = sin(2π x_2) X dx^1`` with ``<X, X> = 1`` (the closed-form fixture)."""
    X = _generator(k)
    X = X / np.sqrt(-np.trace(X @ X).real)
    q = (0, 1) + (0,) * (m - 2)
    return BandLimitedForm(m, 1, k, ((0, q, -np.pi / 2, X),))
