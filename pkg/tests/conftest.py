import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

from acceptance_log import RESULTS  # noqa: E402
from scalefn import maps  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

@pytest.fixture(scope="session")
def ex1():
    return maps.example1()


@pytest.fixture(scope="session")
def quad():
    return maps.quadratic()


@pytest.fixture(scope="session")
def cubic_map():
    return maps.cubic()


@pytest.fixture(scope="session")
def doubling_map():
    return maps.doubling()


@pytest.fixture(scope="session")
def identity_map():
    return maps.identity()


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        ok, detail = RESULTS[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
