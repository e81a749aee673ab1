import numpy as np
import pytest

from convexeq.geometry import Ball, Polytope

ACCEPTANCE_LINES = []

SQUARE = [[1, 1], [-1, 1], [-1, -1], [1, -1]]


@pytest.fixture
def square():
    return Polytope(SQUARE)


@pytest.fixture
def interval():
    return Polytope([[-1.0], [1.0]])


@pytest.fixture
def disk():
    return Ball([0.0, 0.0], 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def random_polytope(rng, n, m_max=20, m_min=None):
    m = int(rng.integers(m_min or n + 1, m_max + 1))
    return Polytope(rng.uniform(-1, 1, (m, n)))


def random_exterior_point(rng, S, scale=3.0):
    from convexeq.oracle import membership_residual

    while True:
        x = rng.uniform(-scale, scale, S.dim)
        if membership_residual(S, x[None, :])[0] > 1e-6:
            return x


def record(line):
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
