import sys

import numpy as np
import pytest

from loopspam.states import TwoQubitState


def random_mixed_state(rng, max_terms=4):
    """Random mixture of up to ``max_terms`` random pure states."""
    rho = np.zeros((4, 4), dtype=complex)
    for w in rng.dirichlet(np.ones(rng.integers(1, max_terms + 1))):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        v /= np.linalg.norm(v)
        rho += w * np.outer(v, v.conj())
    return TwoQubitState(rho)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
