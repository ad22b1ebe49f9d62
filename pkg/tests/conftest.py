import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from trisecant.theta import SiegelMatrix

settings.register_profile(
    "trisecant",
    deadline=None,
    derandomize=True,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("trisecant")

# criterion number -> summary line, filled by test_acceptance
ACCEPTANCE_LINES = {}


def random_siegel(rng, g, imag_floor=0.6):
    X = rng.uniform(-0.5, 0.5, (g, g))
    A = rng.normal(size=(g, g))
    Y = A @ A.T / g + imag_floor * np.eye(g)
    return SiegelMatrix((X + X.T) / 2 + 1j * Y)


def random_z(rng, g, re=0.5, im=0.3):
    return rng.uniform(-re, re, g) + 1j * rng.uniform(-im, im, g)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
