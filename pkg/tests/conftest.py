from fractions import Fraction

import pytest
from hypothesis import strategies as st

from tropicount.geometry import PointSet

rationals = st.builds(Fraction, st.integers(-12, 12), st.sampled_from([1, 2, 3, 4]))
nonneg = st.builds(Fraction, st.integers(0, 8), st.sampled_from([1, 2, 4]))


def points(dim: int):
    return st.tuples(*[rationals] * dim)


def point_sets(dim: int, min_size: int = 1, max_size: int = 8):
    return st.lists(points(dim), min_size=min_size, max_size=max_size).map(PointSet)


def inputs(d: int):
    return st.tuples(*[rationals] * d)


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(12345)


# one line per acceptance criterion, printed after the test run
CRITERIA: dict = {}


@pytest.fixture
def criterion():
    def record(number: int, passed: bool, detail: str):
        CRITERIA[number] = (passed, detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        passed, detail = CRITERIA[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if passed else 'FAIL'} - {detail}")
