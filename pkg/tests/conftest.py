import numpy as np
import pytest

from gaugeflow.forms import GridSpec
from gaugeflow.sampling import random_form


def sample_form(m, degree, N, seed, k=2, amplitude=0.3, band_limit=2, n=None):
    grid = GridSpec(m, N, k, n if n is not None else max(2, (m + 1) // 2))
    return random_form(m, degree, k, seed, amplitude, band_limit).sample(grid)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
