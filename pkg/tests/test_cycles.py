import math

import mpmath as mp
import numpy as np
import pytest

from lienard.curves import RestoringFunction
from lienard.cycles import (
    LimitCycle,
    Stability,
    _refine_near_misses,
    alpha_bar,
    check_theorem,
    classify_stability,
    default_y_max,
    scan_cycles,
)
from lienard.dynamics import LienardSystem, half_return
from lienard.errors import NoRootInInterval, ScanTooCoarse

from conftest import expected

mp.mp.dps = 30




def F2(x):
    # second piece of the first example
    return -0.15 + 0.25 * mp.sqrt(1 - ((x - 0.3) / 0.125) ** 2)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cycle_count_equals_zero_count(reports, n):
    assert len(reports[n].cycles_found) == len(reports[n].zeros)


@pytest.mark.parametrize("n", [1, 2])
def test_cycle_crossings_match_reference(reports, n):
    ys = [c.y0 for c in reports[n].cycles_found]
    assert ys == pytest.approx(expected(n)["cycles_y0"], abs=1e-4)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_fixed_points_confirmed_by_reference_solver(reports, systems, oracle, n):
    for c in reports[n].cycles_found:
        assert abs(c.residual) < 1e-8
        assert abs(oracle(systems[n], c.y0) - c.y0) < 1e-8


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cycle_geometry(reports, n):
    for k, c in enumerate(reports[n].cycles_found, start=1):
        assert c.index == k
        assert c.alpha_cross > 0
        assert c.amplitude >= c.alpha_cross


@pytest.mark.parametrize("n", [1, 2, 3])
def test_stability_matches_reference_expectation(reports, n):
    assert [c.stability.value for c in reports[n].cycles_found] == expected(n)["stability"]


def test_stability_agrees_with_sign_of_delta(reports, systems, oracle):
    # attracting: delta > 0 inside and < 0 outside; repelling: the reverse
    s = systems[1]
    for c in reports[1].cycles_found:
        h = 0.02 * c.y0
        inner = oracle(s, c.y0 - h) - (c.y0 - h)
        outer = oracle(s, c.y0 + h) - (c.y0 + h)
        want = Stability.STABLE if inner > 0 > outer else Stability.UNSTABLE
        assert c.stability is want
    assert oracle(s, 0.5) - 0.5 < 0 < oracle(s, 0.7) - 0.7


def test_conservative_pseudo_cycle_is_neutral(zero_system):
    c = LimitCycle(index=1, y0=0.5, alpha_cross=0.5, amplitude=0.5)
    assert classify_stability(zero_system, c) is Stability.NEUTRAL


def test_conservative_scan_reports_continuum(zero_system):
    scan = scan_cycles(zero_system)
    assert scan.cycles == []
    assert any("DegenerateContinuum" in n for n in scan.notes)


# -- alpha bar --------------------------------------------------------------------


def test_alpha_bar_example1_reference_and_oracle(reports, systems):
    y0 = reports[1].cycles_found[0].y0
    ab = alpha_bar(systems[1], y0, (0.2, 0.5), index=1)
    assert ab.value == pytest.approx(expected(1)["alpha_bars"][0], abs=1e-4)
    ref = mp.findroot(lambda a: a * a + F2(a) ** 2 - mp.mpf(y0) ** 2, (0.24, 0.27), solver="anderson")
    assert ab.value == pytest.approx(float(ref), abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_alpha_bars_reference(reports, n):
    got = [a.value for a in reports[n].alpha_bars]
    assert got == pytest.approx(expected(n)["alpha_bars"], abs=1e-4)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_alpha_bar_residual_and_interval(reports, systems, n):
    s, zs = systems[n], reports[n].zeros
    for ab, c in zip(reports[n].alpha_bars, reports[n].cycles_found):
        i = ab.interval_index
        assert zs[i - 1] < ab.value < zs[i]
        assert abs(2 * s.g.G(ab.value) + s.F(ab.value) ** 2 - c.y0**2) < 1e-10


def test_alpha_bar_at_a_zero_of_F_is_y0(systems):
    # F(0.5) = 0 and g(x) = x leave a^2 = y0^2
    ab = alpha_bar(systems[1], 0.5, (0.2, 0.7))
    assert ab.value == pytest.approx(0.5, abs=1e-14)


def test_alpha_bar_takes_largest_root(systems):
    ab = alpha_bar(systems[1], 0.25, (0.2, 0.5))
    assert ab.value == max(ab.roots)


def test_alpha_bar_without_root(systems):
    with pytest.raises(NoRootInInterval):
        alpha_bar(systems[1], 0.01, (0.2, 0.5))


# -- theorem ------------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_theorem_holds_for_examples(reports, n):
    r = reports[n]
    assert r.conditions_pass and r.count_matches and r.all_pass
    L = r.condition_iii.detail["L"]
    for ab in r.alpha_bars:
        assert ab.value < L[ab.interval_index]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_localization(reports, n):
    r = reports[n]
    L0 = r.condition_iii.detail["L"][0]
    marks = [L0] + [a.value for a in r.alpha_bars] + [math.inf]
    for k, c in enumerate(r.cycles_found):
        assert marks[k] < c.alpha_cross <= marks[k + 1]
    assert r.localization.passed


def test_flat_tail_fails_condition_iv(systems):
    flat = LienardSystem(systems[1].F.with_tail_slope(0.0), name="flat")
    r = check_theorem(flat)
    assert not r.condition_iv.passed
    assert not r.all_pass


def test_report_serializes(reports):
    import json
    d = reports[3].to_dict()
    text = json.dumps(d, allow_nan=False)
    assert json.loads(text)["cycle_count_expected"] == 3
    assert "order" in d


def test_default_y_max_for_linear_g(systems):
    assert default_y_max(systems[1]) == pytest.approx(3 * 0.5, rel=1e-12)


def test_default_y_max_cubic_g(systems):
    s = LienardSystem(systems[1].F, RestoringFunction(((3, 4.0),)))
    y = default_y_max(s) / 2
    assert 2 * s.g.G(y) == pytest.approx(0.75**2, rel=1e-12)


def test_nonlinear_restoring_force_still_finds_two_cycles(systems):
    s = LienardSystem(systems[1].F, RestoringFunction(((1, 1.0), (3, 0.5))))
    scan = scan_cycles(s)
    assert len(scan.cycles) == 2
    for c in scan.cycles:
        assert abs(half_return(s, c.y0) - c.y0) < 1e-9


def test_two_roots_in_one_cell_are_detected():
    ys = np.linspace(1e-3, 1.0, 200)

    def delta(y):
        return (y - 0.5) ** 2 - 1e-8

    ds = np.array([delta(y) for y in ys])
    with pytest.raises(ScanTooCoarse):
        _refine_near_misses(delta, ys, ds)


def test_monotone_away_from_zero_beyond_outer_cycle(reports, systems):
    from lienard.cycles import _delta
    from lienard.integrator import IntegratorConfig
    for n in (1, 2, 3):
        outer = reports[n].cycles_found[-1]
        d = _delta(systems[n], IntegratorConfig())
        vals = np.array([d(float(y)) for y in np.linspace(outer.y0, 2 * outer.y0, 21)[1:]])
        sign = 1.0 if outer.stability is Stability.UNSTABLE else -1.0
        assert np.all(sign * vals > 0)
        assert np.all(np.diff(sign * vals) >= 0)
