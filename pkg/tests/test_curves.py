import math

import pytest
import sympy as sp

from lienard.curves import (
    ArcSegment,
    LinearSegment,
    OddPiecewiseCurve,
    RestoringFunction,
    derivative,
    eval_curve,
    extrema,
    linear,
    positive_zeros,
    snap_offsets,
    validate,
)
from lienard.errors import DomainError, NonSimpleZero, VerticalTangent

from conftest import expected

X = sp.symbols("x")
# the two arcs meeting at x = 0.2 in the first example, written out symbolically
F1 = sp.Rational(3, 20) - sp.Rational(1, 4) * sp.sqrt(1 - (X - sp.Rational(1, 10)) ** 2 / sp.Rational(1, 8) ** 2)
F2 = -sp.Rational(3, 20) + sp.Rational(1, 4) * sp.sqrt(1 - (X - sp.Rational(3, 10)) ** 2 / sp.Rational(1, 8) ** 2)


@pytest.fixture
def F(systems):
    return systems[1].F


def test_eval_origin_is_zero(F):
    assert eval_curve(F, 0.0) == 0.0


def test_eval_at_first_extremum_matches_hand_value(F):
    # root term is 1 at x = 0.1
    assert F(0.1) == pytest.approx(float(F1.subs(X, sp.Rational(1, 10))), abs=1e-15)
    assert F(0.1) == pytest.approx(-0.1, abs=1e-15)


def test_eval_odd_reflection(F):
    assert F(-0.1) == pytest.approx(0.1, abs=1e-15)
    for x in (0.03, 0.21, 0.37, 0.9, 3.0):
        assert F(-x) == -F(x)


def test_eval_zero_at_a1(F):
    assert F(0.2) == pytest.approx(0.0, abs=1e-15)


def test_derivative_extremum_is_zero(F):
    assert derivative(F, 0.1) == pytest.approx(0.0, abs=1e-15)


def test_derivative_joint_matches_symbolic_on_both_sides(F):
    left = float(sp.diff(F1, X).subs(X, sp.Rational(1, 5)))
    right = float(sp.diff(F2, X).subs(X, sp.Rational(1, 5)))
    assert left == pytest.approx(8 / 3, rel=1e-14)
    assert right == pytest.approx(8 / 3, rel=1e-14)
    assert F.derivative(0.2) == pytest.approx(left, rel=1e-12)
    assert F.derivative(0.2 - 1e-9) == pytest.approx(left, rel=1e-6)
    assert F.derivative(0.2 + 1e-9) == pytest.approx(right, rel=1e-6)


def test_derivative_on_tail(F):
    assert derivative(F, 0.6) == pytest.approx(-4 / 3, rel=1e-15)


def test_derivative_is_even(F):
    for x in (0.05, 0.25, 0.45, 2.0):
        assert F.derivative(-x) == pytest.approx(F.derivative(x), rel=1e-14)


def test_vertical_tangent_refused():
    arc = ArcSegment(0.0, 0.2, 0.1, 0.0, 1.0, 0.1)
    with pytest.raises(VerticalTangent):
        arc.slope(0.2)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_positive_zeros_match_examples(systems, n):
    assert positive_zeros(systems[n].F) == pytest.approx(expected(n)["zeros"], abs=1e-6)


def test_no_positive_zero_for_identity_line():
    F = OddPiecewiseCurve((linear(0.0, math.inf, 1.0),))
    assert positive_zeros(F) == []


def test_touching_zero_is_not_simple():
    # -x, then back up to touch zero at 0.2, then down again
    F = OddPiecewiseCurve((
        linear(0.0, 0.1, -1.0),
        linear(0.1, 0.2, 1.0, 0.1, -0.1),
        linear(0.2, math.inf, -1.0, 0.2, 0.0),
    ), c1=False)
    with pytest.raises(NonSimpleZero):
        positive_zeros(F)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_extrema_locations(systems, n):
    xs = [x for x, _ in extrema(systems[n].F)]
    assert xs == pytest.approx(expected(n)["extrema_x"], abs=1e-9)


def test_extrema_values_example1(F):
    vals = dict(extrema(F))
    assert vals[0.1] == pytest.approx(-0.1, abs=1e-15)
    assert vals[0.3] == pytest.approx(0.1, abs=1e-15)


def test_domain_error_beyond_partial_curve():
    F = OddPiecewiseCurve((ArcSegment(0.0, 0.2, 0.1, 0.15, -0.25, 0.125),))
    with pytest.raises(DomainError):
        F(0.3)


@pytest.mark.parametrize("n", [1, 3])
def test_validate_examples(systems, n):
    rep = validate(systems[n].F)
    assert rep.ok and rep.c1_ok and rep.complete


def test_validate_flags_value_jump():
    F = OddPiecewiseCurve((linear(0.0, 1.0, 1.0), linear(1.0, math.inf, 1.0, 1.0, 1.5)), c1=False)
    rep = validate(F)
    assert not rep.continuous
    assert rep.max_value_residual == pytest.approx(0.5)


def test_validate_flags_origin_offset():
    F = OddPiecewiseCurve((linear(0.0, math.inf, 1.0, 0.0, 1e-6),))
    assert not validate(F).ok


def test_snap_offsets_closes_small_gaps():
    segs = (linear(0.0, 1.0, 1.0), linear(1.0, math.inf, 2.0, 1.0, 1.0 + 3e-7))
    F, worst = snap_offsets(OddPiecewiseCurve(segs))
    assert worst == pytest.approx(3e-7, rel=1e-6)
    assert validate(F, c1_tol=10).max_value_residual < 1e-15


def test_restoring_function_and_antiderivative():
    g = RestoringFunction(((1, 1.0), (3, 2.0)))
    assert g(2.0) == 2.0 + 16.0
    assert g(-2.0) == -g(2.0)
    assert g.G(2.0) == pytest.approx(2.0 + 8.0)
    with pytest.raises(ValueError):
        RestoringFunction(((2, 1.0),))
    with pytest.raises(ValueError):
        RestoringFunction(((1, -1.0),))
    with pytest.raises(ValueError):
        RestoringFunction(((1, 0.0),))


def test_segment_invariants_rejected():
    with pytest.raises(ValueError):
        ArcSegment(0.2, 0.1, 0.1, 0.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        ArcSegment(0.0, 0.1, 0.0, 0.0, 1.0, -1.0)
    with pytest.raises(ValueError):
        LinearSegment(1.0, 1.0, 1.0, 1.0, 0.0)
