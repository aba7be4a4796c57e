import numpy as np
import pytest

from eigencert import NormKind


def ones(n):
    return np.full((n, n), 1.0 / n)


def e(i, n):
    v = np.zeros(n)
    v[i] = 1.0
    return v


def unit(i, j, n):
    m = np.zeros((n, n))
    m[i, j] = 1.0
    return m


ALL_KINDS = [NormKind.ONE, NormKind.TWO, NormKind.SUP]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance lines are collected here and printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
