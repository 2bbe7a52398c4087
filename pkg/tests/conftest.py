import numpy as np
import pytest

from qfdiv.states import make_functional


@pytest.fixture
def boundary_pair():
    """rho = diag(3/2, 0), sigma = [[1,1],[1,1]]: G has spectrum {0, 1} only."""
    return make_functional(np.diag([1.5, 0.0])), make_functional(np.array([[1.0, 1.0], [1.0, 1.0]]))


def random_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
