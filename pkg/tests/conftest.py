import numpy as np
import pytest

from funcbregman import make_interval_grid
from funcbregman.measure import GridFunction

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def unit_grid():
    return make_interval_grid(0.0, 1.0, 64)


def positive(space, rng, low=0.2, high=2.0):
    return GridFunction(space, rng.uniform(low, high, len(space)))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
