import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_density_matrix(rng, rank=8):
    g = rng.normal(size=(8, rank)) + 1j * rng.normal(size=(8, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_product_mixture(rng, k):
    from ghzsep.states import random_product_state

    w = rng.dirichlet(np.ones(k))
    return sum(wi * random_product_state(rng) for wi in w)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
