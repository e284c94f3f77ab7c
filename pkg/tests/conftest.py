import math

import pytest

from slabheat.domain import (
    CallableProfile,
    Constant,
    PiecewiseLinear,
    Polynomial,
    SingleMode,
    SlabProblem,
)


def parabola():
    return Polynomial([0.0, 1.0, -1.0])


def hat(L=1.0):
    return PiecewiseLinear([0.0, L / 2, L], [0.0, 1.0, 0.0])


# profiles used by the sweeping property tests; every one vanishes at both
# faces except the constant, which is included to exercise Gibbs behaviour
PROFILES = {
    "single_mode": SingleMode(1, 1.0),
    "mode3": SingleMode(3, 2.5),
    "constant": Constant(1.0),
    "linear": Polynomial([0.0, 1.0]),
    "parabola": parabola(),
    "hat": hat(),
    "callable": CallableProfile(lambda x: x * math.exp(-x) * (1 - x)),
}


@pytest.fixture
def unit_parabola():
    return SlabProblem(1.0, 1.0, parabola())


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
