import numpy as np
import pytest
from scipy.stats import unitary_group

from robust_pulses.quantum import su2_exp


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def haar_unitary(rng, d=2):
    return unitary_group.rvs(d, random_state=rng)


def random_rotation(rng, scale=np.pi):
    return su2_exp(rng.normal(size=3) * scale / np.sqrt(3))


def equal_up_to_phase(a, b, tol=1e-9):
    k = np.argmax(np.abs(b))
    phase = a.flat[k] / b.flat[k]
    return abs(abs(phase) - 1) < tol and np.allclose(a, phase * b, atol=tol)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
