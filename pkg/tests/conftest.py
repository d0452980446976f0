import sys

import numpy as np
import pytest

from metriplectic import builtin

BUILTINS = ("rigid_body", "oscillator", "degenerate_ex1", "degenerate_ex2")


@pytest.fixture(scope="session")
def systems():
    return {name: builtin(name).build() for name in BUILTINS}


@pytest.fixture(scope="session")
def rigid_body(systems):
    return systems["rigid_body"]


@pytest.fixture(scope="session")
def oscillator(systems):
    return systems["oscillator"]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
