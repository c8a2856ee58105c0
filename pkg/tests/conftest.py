import numpy as np
import pytest

from setsize.domain import HiddenSet, Line, SubsetFamily
from setsize.oracle import OracleSession

ACCEPTANCE_RESULTS: dict = {}


def make_session(elements, n, family=SubsetFamily.INTERVALS, seed=0, shape=None, record=False):
    shape = shape if shape is not None else Line(n)
    return OracleSession(shape, HiddenSet.of(elements, shape.n), family,
                         rng=np.random.default_rng(seed), record=record)


@pytest.fixture
def session_factory():
    return make_session


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    from setsize.acceptance import criterion_line

    terminalreporter.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE_RESULTS, key=int):
        terminalreporter.write_line(criterion_line(criterion, ACCEPTANCE_RESULTS[criterion]))
