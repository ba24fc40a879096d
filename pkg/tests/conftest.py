from fractions import Fraction

import pytest

from rncocycle.cli import standard_families
from rncocycle.measures import make_period_j, make_sparse


@pytest.fixture(scope="session")
def families():
    return standard_families()


@pytest.fixture(scope="session")
def period3():
    return make_period_j(3)


@pytest.fixture(scope="session")
def sparse():
    return make_sparse()


def frac(s):
    return Fraction(s)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.pytest_terminal_summary_lines():
        terminalreporter.write_line(line)
