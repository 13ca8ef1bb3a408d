import numpy as np
import pytest

from fsc.models import Axis, FreeSDOF
from fsc.probability import Distribution, RandomDomain
from fsc.quadrature import tensor_grid


@pytest.fixture
def unit_grid():
    """20-point Gauss-Legendre rule for Uniform[-1, 1]."""
    return tensor_grid(RandomDomain([Distribution.uniform(-1.0, 1.0)]), [20])


@pytest.fixture
def case1_domain():
    return RandomDomain([Distribution.uniform(340.0, 460.0)])


@pytest.fixture
def case1_grid(case1_domain):
    return tensor_grid(case1_domain, [100])


@pytest.fixture
def case1_model():
    return FreeSDOF(100.0, Axis(0), 0.05, 0.2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)


#: one line per acceptance criterion, filled in by tests/test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
