import numpy as np
import pytest

from subqchem.lattice import make_cell


@pytest.fixture
def hydrogen_cell():
    return make_cell(1, 2, 50.0, [(1, (0.13, 0.37, 0.71))])


@pytest.fixture
def helium_cell():
    return make_cell(2, 2, 50.0, [(2, (0.1, 0.2, 0.3))])


@pytest.fixture
def rng():
    return np.random.default_rng(20191015)


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
