import numpy as np
import pytest

from gaugeflow.forms import GridSpec
from gaugeflow.liealg import is_algebra, is_group
from gaugeflow.sampling import abelian_benchmark, random_form, random_gauge


def test_seeded_fields_are_reproducible():
    g = GridSpec(2, 16)
    a = random_form(2, 1, 2, 7).sample(g)
    b = random_form(2, 1, 2, 7).sample(g)
    c = random_form(2, 1, 2, 8).sample(g)
    assert a.data.tobytes() == b.data.tobytes()
    assert not np.array_equal(a.data, c.data)


def test_fields_live_in_the_algebra():
    g = GridSpec(3, 8, 3, 2)
    assert is_algebra(random_form(3, 2, 3, 1, 1.0).sample(g).data)
    assert is_group(random_gauge(3, 3, 2).sample(g).u)


def test_window_sampling_wraps_periodically():
    g = GridSpec(2, 16)
    field = random_form(2, 1, 2, 3)
    full = field.sample(g).data
    idx = np.arange(-2, 6)
    part = field.sample(g, idx).data
    np.testing.assert_allclose(part, full[:, idx % 16], atol=1e-15)


def test_band_limit_and_amplitude():
    g = GridSpec(2, 32)
    B = random_form(2, 1, 2, 5, 0.1, band_limit=2).sample(g)
    spec = np.abs(np.fft.fftn(B.data, axes=(1, 2)))
    freqs = np.abs(np.fft.fftfreq(32, 1 / 32))
    high = (freqs[:, None] > 2) | (freqs[None, :] > 2)
    assert spec[:, high].max() < 1e-12
    assert random_form(2, 1, 2, 5, 0.0).sample(g).data.max() == 0
    with pytest.raises(ValueError):
        random_form(2, 1, 2, 5, band_limit=0)


def test_abelian_benchmark_profile():
    g = GridSpec(2, 16)
    A = abelian_benchmark().sample(g)
    x2 = np.arange(16) / 16
    X = A.data[0, 0, 3] / np.sin(2 * np.pi * x2[3])
    assert -np.trace(X @ X).real == pytest.approx(1.0)
    np.testing.assert_allclose(A.data[0, 5, :, 0, 0].imag, X[0, 0].imag * np.sin(2 * np.pi * x2), atol=1e-15)
    assert np.all(A.data[1] == 0)
    with pytest.raises(ValueError):
        A0 = random_form(2, 1, 2, 1)
        A0.sample(GridSpec(3, 8))
