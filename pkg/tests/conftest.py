import sys

import pytest

from quatsystole.lattice import AdmissibleGroupSpec
from quatsystole.numberfield import IdealSpec, RealQuadraticField, classify_prime
from quatsystole.systole import find_witness


@pytest.fixture(scope="session")
def k2():
    return RealQuadraticField(2)


@pytest.fixture(scope="session")
def spec():
    return AdmissibleGroupSpec.build()


@pytest.fixture(scope="session")
def witness(spec):
    return find_witness(spec)


@pytest.fixture(scope="session")
def P7(k2):
    return classify_prime(7, k2)[0]


@pytest.fixture(scope="session")
def I7(P7):
    return IdealSpec.prime_power(P7)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.pytest_terminal_lines():
        terminalreporter.write_line(line)
