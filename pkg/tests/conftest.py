import numpy as np
import pytest

from clext.algebra import new_algebra
from clext.reps import fock_exists


def random_admissible(rng, lam, low=-0.9, high=2.0, tries=1000):
    """Random alpha whose algebra has a Fock representation."""
    for _ in range(tries):
        params = new_algebra(lam, rng.uniform(low, high, size=lam - 1))
        if fock_exists(params):
            return params
    raise RuntimeError("no admissible alpha found")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
