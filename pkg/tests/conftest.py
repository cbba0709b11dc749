from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

import helpers
from oscal.extraction import FunctionSeq, MovingStep
from oscal.func import QFunction
from oscal.space import chain_space

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

# filled in by test_acceptance; echoed after the run so the checklist
# survives output capture
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance checklist")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def k1():
    return chain_space(1)


@pytest.fixture(scope="session")
def k2():
    return chain_space(2)


@pytest.fixture(scope="session")
def k3():
    return chain_space(3)


@pytest.fixture(scope="session")
def f1(k1):
    """Indicator of the limit point: 1 at the root, 0 on the copies."""
    return QFunction(k1, {0: Fraction(1), 1: Fraction(0)})


@pytest.fixture(scope="session")
def f2(k2):
    """Middle-level bump: 0 at root and isolated leaves, 1 between."""
    return QFunction(k2, {0: Fraction(0), 1: Fraction(1), 2: Fraction(0)})


@pytest.fixture(scope="session")
def phi3(k3):
    """Alternating -1/0 profile down the rank-3 chain."""
    return QFunction(
        k3,
        {0: Fraction(-1), 1: Fraction(0), 2: Fraction(-1), 3: Fraction(0)},
    )


@pytest.fixture(scope="session")
def g_seq(k1):
    return FunctionSeq(
        QFunction(k1, {0: Fraction(-1), 1: Fraction(0)}), MovingStep(None)
    )


@pytest.fixture(scope="session")
def h_seq(phi3):
    return FunctionSeq(phi3, MovingStep(None))


@pytest.fixture(scope="session")
def corpus():
    return helpers.corpus()
