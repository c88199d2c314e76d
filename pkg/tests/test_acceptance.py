"""Acceptance criteria, one test each, at the stated tolerances.

Each test records a ``PASS``/``FAIL`` line; the lines are printed as they
happen (visible with ``-s``) and again in the terminal summary.
Run directly with ``python tests/test_acceptance.py``.
"""

import time

import numpy as np
import pytest

from lienard.construction import build_phi, build_plan, odani_check
from lienard.cycles import Stability, alpha_bar, check_theorem
from lienard.dynamics import half_return
from lienard.integrator import IntegratorConfig
from lienard.serialize import bundled_plan

from conftest import expected

RESULTS = {}


class criterion:
    """Context manager recording one acceptance line."""

    def __init__(self, n, title):
        self.n, self.title, self.detail = n, title, ""

    def __enter__(self):
        return self

    def __exit__(self, et, ev, tb):
        ok = et is None
        why = self.detail if ok else f"{self.detail} {ev}".strip()
        line = f"criterion {self.n:2d} {'PASS' if ok else 'FAIL'}: {self.title}" + (f" ({why})" if why else "")
        RESULTS[self.n] = line
        print(line)
        return False


@pytest.fixture(scope="module")
def timed_reports(systems):
    out = {}
    for n, s in systems.items():
        t = time.perf_counter()
        rep = check_theorem(s, IntegratorConfig(rel_tol=1e-10))
        out[n] = (rep, time.perf_counter() - t)
    return out


def test_c01_example1_cycles(timed_reports):
    with criterion(1, "Example 1: exactly 2 cycles at y0 = 0.26731065, 0.5749823 (1e-4)") as c:
        rep, secs = timed_reports[1]
        ys = [x.y0 for x in rep.cycles_found]
        c.detail = f"y0 = {[round(y, 8) for y in ys]}, {secs:.1f} s"
        assert len(ys) == 2
        assert np.max(np.abs(np.subtract(ys, [0.26731065, 0.5749823]))) < 1e-4
        assert secs < 30


def test_c02_example1_alpha_bar(timed_reports, systems):
    with criterion(2, "Example 1: alpha_bar_1 = 0.254219124 (1e-4) and < L1 = 0.3") as c:
        rep, _ = timed_reports[1]
        ab = alpha_bar(systems[1], rep.cycles_found[0].y0, (0.2, 0.5), index=1)
        c.detail = f"alpha_bar_1 = {ab.value:.10f}"
        assert abs(ab.value - 0.254219124) < 1e-4
        assert ab.value < 0.3


def test_c03_example2(timed_reports, systems):
    with criterion(3, "Example 2: cycles at 0.29039755, 0.567249; alpha_bar_1 = 0.2892792083 (1e-4)") as c:
        rep, secs = timed_reports[2]
        ys = [x.y0 for x in rep.cycles_found]
        ab = rep.alpha_bars[0].value
        c.detail = f"y0 = {[round(y, 8) for y in ys]}, alpha_bar_1 = {ab:.10f}, {secs:.1f} s"
        assert len(ys) == 2
        assert np.max(np.abs(np.subtract(ys, [0.29039755, 0.567249]))) < 1e-4
        assert abs(ab - 0.2892792083) < 1e-4
        assert secs < 30


def test_c04_example2_odani_locus():
    with criterion(4, "Example 2: |H1L(f1L(s))| = |f1L(s)| at s = 0.05290111 (1e-4), pattern <, >") as c:
        eq = odani_check(build_plan(bundled_plan(2))).equality[0]
        signs = [p["sign"] for p in eq.to_dict()["pattern"]]
        c.detail = f"loci = {eq.interior_loci}, signs = {signs}"
        assert len(eq.interior_loci) == 1
        assert abs(eq.interior_loci[0] - 0.05290111) < 1e-4
        assert signs == [-1, 1]


def test_c05_example3(timed_reports):
    with criterion(5, "Example 3: 3 cycles; alpha_bar = 0.12418214965, 0.2354818163 (1e-4); theorem holds") as c:
        rep, secs = timed_reports[3]
        abs_ = [a.value for a in rep.alpha_bars]
        L = rep.condition_iii.detail["L"]
        c.detail = f"alpha_bar = {[round(a, 10) for a in abs_]}, {secs:.1f} s"
        assert len(rep.cycles_found) == 3
        assert np.max(np.abs(np.subtract(abs_, [0.12418214965, 0.2354818163]))) < 1e-4
        assert rep.all_pass
        assert abs_[0] < L[1] and abs_[1] < L[2]
        assert secs < 30


def test_c06_phi_solve():
    with criterion(6, "phi solve: A = 5, B = 0.04 and A = 16/3, B = 11/300 (1e-12)") as c:
        left = build_phi(0.0, 0.1, 0.2, 0.3)
        right = build_phi(0.1, 0.2, 0.3, 0.5)
        errs = [abs(left.A - 5), abs(left.B - 0.04), abs(right.A - 16 / 3), abs(right.B - 11 / 300)]
        c.detail = f"max error {max(errs):.1e}"
        assert max(errs) < 1e-12


def test_c07_conservation(zero_system):
    with criterion(7, "conservation: F = 0, g = x gives |P(y0) - y0| < 1e-8") as c:
        errs = [abs(half_return(zero_system, y) - y) for y in (0.1, 0.5, 1.0, 2.0)]
        c.detail = f"max |P - y0| = {max(errs):.1e}"
        assert max(errs) < 1e-8


def test_c08_return_map_monotone(timed_reports, systems):
    with criterion(8, "P strictly increasing on a 50-point grid spanning all cycles") as c:
        mins = []
        for n, s in systems.items():
            cyc = timed_reports[n][0].cycles_found
            # beyond ~1.02 y0_outer the second example's orbits escape to infinity
            ys = np.linspace(0.5 * cyc[0].y0, 1.005 * cyc[-1].y0, 50)
            P = np.array([half_return(s, float(y)) for y in ys])
            mins.append(float(np.min(np.diff(P))))
            assert np.all(np.diff(P) > 0), n
        c.detail = "min step " + ", ".join(f"{m:.2e}" for m in mins)


def test_c09_localization(timed_reports):
    with criterion(9, "cycle i crosses the x-axis in (alpha_bar_{i-1}, alpha_bar_i], alpha_bar_0 = L0") as c:
        for n, (rep, _) in timed_reports.items():
            L0 = rep.condition_iii.detail["L"][0]
            marks = [L0] + [a.value for a in rep.alpha_bars] + [np.inf]
            for k, cyc in enumerate(rep.cycles_found):
                assert marks[k] < cyc.alpha_cross <= marks[k + 1], (n, k)
            assert rep.localization.passed
        c.detail = "examples 1, 2, 3"


def test_c10_stability_alternates(timed_reports):
    with criterion(10, "innermost Stable, flags alternate, no Neutral") as c:
        flags = {}
        for n, (rep, _) in timed_reports.items():
            st = [cyc.stability for cyc in rep.cycles_found]
            flags[n] = [s.value for s in st]
            assert st[0] is Stability.STABLE
            assert Stability.NEUTRAL not in st
            assert all(a is not b for a, b in zip(st, st[1:]))
        c.detail = str(flags)


def test_c11_convergence(systems):
    with criterion(11, "P(0.3) changes shrink as rel_tol halves 1e-6 to 1e-10; final change < 1e-9") as c:
        tols = [1e-6 * 2.0**-k for k in range(14)]  # down to 1.2e-10
        P = [half_return(systems[1], 0.3, IntegratorConfig(rel_tol=t)) for t in tols]
        changes = np.abs(np.diff(P))
        c.detail = f"changes {changes[0]:.1e} -> {changes[-1]:.1e}"
        assert np.all(np.diff(changes) < 0)
        assert changes[-1] < 1e-9


def pytest_terminal_summary_lines():
    return [RESULTS[k] for k in sorted(RESULTS)]


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
