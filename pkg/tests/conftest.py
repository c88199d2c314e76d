import json
import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from lienard.curves import LinearSegment, OddPiecewiseCurve
from lienard.cycles import check_theorem
from lienard.dynamics import LienardSystem
from lienard.serialize import bundled, bundled_system


def expected(n):
    return json.loads(bundled(f"example{n}.expected.json").read_text())


@pytest.fixture(scope="session")
def systems():
    return {n: bundled_system(n) for n in (1, 2, 3)}


@pytest.fixture(scope="session")
def reports(systems):
    """Theorem reports (with their cycle scans); computed once, they take ~1.5 s each."""
    return {n: check_theorem(s) for n, s in systems.items()}


@pytest.fixture(scope="session")
def zero_system():
    return LienardSystem(OddPiecewiseCurve((LinearSegment(0.0, math.inf, 0.0, 0.0, 0.0),)), name="conservative")


def oracle_half_return(system, y0, rtol=1e-12, atol=1e-14, max_step=2e-3):
    """Reference P(y0) from scipy's DOP853, independent of the package integrator."""
    F, g = system.F, system.g

    def rhs(t, u):
        return [u[1] - F(u[0]), -g(u[0])]

    def neg_axis(t, u):
        return u[0] if u[1] < 0 else 1.0
    neg_axis.terminal = True
    neg_axis.direction = -1

    sol = solve_ivp(rhs, (0.0, 200.0), [0.0, y0], method="DOP853", rtol=rtol, atol=atol,
                    events=neg_axis, max_step=max_step)
    assert sol.t_events[0].size, "oracle orbit did not return"
    return -float(sol.y_events[0][0][1])


@pytest.fixture
def oracle():
    return oracle_half_return




def pytest_terminal_summary(terminalreporter):
    from test_acceptance import pytest_terminal_summary_lines

    lines = pytest_terminal_summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
