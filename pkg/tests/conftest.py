import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_state(rng, n_modes=32, hbar=0.5, kmin=-10):
    from toruspackets.state import FourierState

    c = rng.normal(size=n_modes) + 1j * rng.normal(size=n_modes)
    c /= np.sqrt(np.sum(np.abs(c) ** 2))
    return FourierState((kmin,), c, hbar)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
