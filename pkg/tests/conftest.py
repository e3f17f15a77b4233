import math

import pytest

from outflowlab import eos, stationary

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def ideal():
    return eos.make_gas("ideal-polytropic", gamma=1.4, R=1.0)


@pytest.fixture(scope="session")
def transonic_spec(ideal):
    return stationary.FarFieldSpec(1.0, 1.0, -math.sqrt(1.4), ideal)


@pytest.fixture(scope="session")
def transonic_profile(transonic_spec):
    return stationary.build_transonic_profile(transonic_spec, 0.1, N=4096)


@pytest.fixture(scope="session")
def small_transonic_profile(transonic_spec):
    # short domain, coarse grid: cheap transient tests
    return stationary.build_transonic_profile(transonic_spec, 0.1, L=60.0, N=512, validate=False)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
