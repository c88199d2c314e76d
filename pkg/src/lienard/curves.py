"""Odd piecewise curves built from elliptic arcs and straight lines.

A curve is described on ``[0, x_end]`` by an ordered run of segments and is
extended to negative abscissae by odd reflection, ``F(-x) = -F(x)``.  Every
``F`` appearing in the worked examples is a chain of arcs

    y(x) = c + r * sqrt(1 - ((x - x0) / b)**2)

closed off by a linear tail, so those are the only two segment kinds.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field, replace
from typing import Sequence, Union

from .errors import DomainError, JointMismatch, NonSimpleZero, VerticalTangent

INF = math.inf

# square-root argument below which an arc endpoint counts as a near-vertical tangent
NEAR_VERTICAL_ARG = 1e-6
# square-root argument below which the derivative is refused outright
VERTICAL_ARG = 1e-12

ZERO_MERGE_TOL = 1e-6
ORIGIN_TOL = 1e-12


@dataclass(frozen=True)
class ArcSegment:
    x_lo: float
    x_hi: float
    x0: float
    c: float
    r: float
    b: float

    kind = "arc"

    def __post_init__(self):
        if not self.x_lo < self.x_hi:
            raise ValueError(f"arc needs x_lo < x_hi, got [{self.x_lo}, {self.x_hi}]")
        if not self.b > 0:
            raise ValueError(f"arc semi-axis b must be positive, got {self.b}")
        if math.isinf(self.x_hi):
            raise ValueError("an arc cannot extend to infinity")

    def root_arg(self, x: float) -> float:
        u = (x - self.x0) / self.b
        return 1.0 - u * u

    def value(self, x: float) -> float:
        arg = self.root_arg(x)
        # rounding at an endpoint of a full half-ellipse can dip just below 0
        if arg < 0.0:
            arg = 0.0
        return self.c + self.r * math.sqrt(arg)

    def slope(self, x: float) -> float:
        arg = self.root_arg(x)
        if arg < VERTICAL_ARG:
            raise VerticalTangent(f"arc derivative undefined at x={x!r} (root argument {arg:.3e})")
        return -self.r * (x - self.x0) / (self.b * self.b * math.sqrt(arg))

    def zeros(self) -> list[float]:
        """Closed-form zeros inside ``[x_lo, x_hi]``."""
        if self.r == 0.0:
            return []
        q = -self.c / self.r
        if q < 0.0 or q > 1.0:
            return []
        u = math.sqrt(max(0.0, 1.0 - q * q))
        out = []
        for x in sorted({self.x0 - self.b * u, self.x0 + self.b * u}):
            if self.x_lo - 1e-12 <= x <= self.x_hi + 1e-12:
                out.append(min(max(x, self.x_lo), self.x_hi))
        return out

    def shifted_to(self, x: float, value: float) -> "ArcSegment":
        """Same arc with the offset ``c`` re-solved so that ``value(x) == value``."""
        return replace(self, c=value - self.r * math.sqrt(max(0.0, self.root_arg(x))))

    def to_dict(self) -> dict:
        return {"kind": "arc", "x_lo": self.x_lo, "x_hi": self.x_hi,
                "x0": self.x0, "c": self.c, "r": self.r, "b": self.b}


@dataclass(frozen=True)
class LinearSegment:
    x_lo: float
    x_hi: float
    slope_: float
    anchor_x: float
    anchor_y: float

    kind = "linear"

    def __post_init__(self):
        if not self.x_lo < self.x_hi:
            raise ValueError(f"linear segment needs x_lo < x_hi, got [{self.x_lo}, {self.x_hi}]")

    def value(self, x: float) -> float:
        return self.anchor_y + self.slope_ * (x - self.anchor_x)

    def slope(self, x: float) -> float:
        return self.slope_

    def zeros(self) -> list[float]:
        if self.slope_ == 0.0:
            if self.anchor_y == 0.0:
                raise NonSimpleZero(f"linear segment vanishes identically on [{self.x_lo}, {self.x_hi}]")
            return []
        x = self.anchor_x - self.anchor_y / self.slope_
        if self.x_lo - 1e-12 <= x <= self.x_hi + 1e-12:
            return [min(max(x, self.x_lo), self.x_hi)]
        return []

    def shifted_to(self, x: float, value: float) -> "LinearSegment":
        return replace(self, anchor_x=x, anchor_y=value)

    def to_dict(self) -> dict:
        x_hi = "inf" if math.isinf(self.x_hi) else self.x_hi
        return {"kind": "linear", "x_lo": self.x_lo, "x_hi": x_hi,
                "slope": self.slope_, "anchor_x": self.anchor_x, "anchor_y": self.anchor_y}


Segment = Union[ArcSegment, LinearSegment]


def linear(x_lo: float, x_hi: float, slope: float, anchor_x: float = None, anchor_y: float = 0.0) -> LinearSegment:
    """Convenience constructor; the anchor defaults to ``(x_lo, anchor_y)``."""
    return LinearSegment(x_lo, x_hi, slope, x_lo if anchor_x is None else anchor_x, anchor_y)


@dataclass(frozen=True)
class OddPiecewiseCurve:
    """An odd function ``F`` given on ``[0, x_end]`` by consecutive segments.

    The curve is *complete* when the last segment runs to ``+inf``.  Curves
    built mid-construction are partial and raise :class:`DomainError` beyond
    their end.
    """

    segments: tuple
    c1: bool = True
    _los: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise ValueError("a curve needs at least one segment")
        for prev, nxt in zip(segs, segs[1:]):
            if nxt.x_lo < prev.x_lo:
                raise ValueError("segments must be ordered by x_lo")
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "_los", tuple(s.x_lo for s in segs))

    @property
    def x_end(self) -> float:
        return self.segments[-1].x_hi

    @property
    def is_complete(self) -> bool:
        return math.isinf(self.x_end)

    def _segment_at(self, x: float, left: bool = False) -> Segment:
        # x >= 0 here; at a joint the right-hand segment wins unless left=True
        if left:
            i = max(bisect_left(self._los, x) - 1, 0)
        else:
            i = bisect_right(self._los, x) - 1
        if i < 0:
            raise DomainError(f"x={x!r} lies before the first segment")
        seg = self.segments[i]
        if x > seg.x_hi:
            raise DomainError(f"x={x!r} is not covered by the curve (ends at {seg.x_hi!r})")
        return seg

    def __call__(self, x: float) -> float:
        if x == 0.0:  # odd; validate() still checks the raw segment value here
            return 0.0
        if x < 0.0:
            return -self._segment_at(-x).value(-x)
        return self._segment_at(x).value(x)

    def derivative(self, x: float) -> float:
        ax = -x if x < 0.0 else x
        return self._segment_at(ax, left=True).slope(ax)

    def values(self, xs) -> list[float]:
        return [self(float(x)) for x in xs]

    def joints(self) -> list[float]:
        return [s.x_lo for s in self.segments[1:]]

    def with_segments(self, segments: Sequence[Segment]) -> "OddPiecewiseCurve":
        return OddPiecewiseCurve(tuple(segments), c1=self.c1)

    def with_tail_slope(self, slope: float) -> "OddPiecewiseCurve":
        """Replace the slope of the final linear tail, keeping its anchor."""
        tail = self.segments[-1]
        if not isinstance(tail, LinearSegment):
            raise ValueError("curve does not end in a linear tail")
        return self.with_segments(self.segments[:-1] + (replace(tail, slope_=slope),))

    def to_dict(self) -> dict:
        return {"segments": [s.to_dict() for s in self.segments], "c1": self.c1}


def eval_curve(curve: OddPiecewiseCurve, x: float) -> float:
    return curve(x)


def derivative(curve: OddPiecewiseCurve, x: float) -> float:
    return curve.derivative(x)


def snap_chain(segments: Sequence[Segment], start_value: float = 0.0, max_shift: float = 1e-4) -> tuple[list, float]:
    """Re-solve offsets along a run of segments so consecutive values agree.

    The first segment is pinned to ``start_value`` at its left end and each
    later one to the value its left neighbour reaches at the shared joint.
    Shifts larger than ``max_shift`` mean the input is not merely rounded,
    so they raise.  Returns the snapped segments and the largest shift.
    """
    out = []
    target = start_value
    worst = 0.0
    for seg in segments:
        snapped = seg.shifted_to(seg.x_lo, target)
        shift = abs(snapped.value(seg.x_lo) - seg.value(seg.x_lo))
        if shift > max_shift:
            raise JointMismatch(f"snapping segment at x={seg.x_lo} would shift it by {shift:.3e}")
        worst = max(worst, shift)
        out.append(snapped)
        if not math.isinf(seg.x_hi):
            target = snapped.value(seg.x_hi)
    return out, worst


def snap_offsets(curve: OddPiecewiseCurve, max_shift: float = 1e-4) -> tuple[OddPiecewiseCurve, float]:
    """Make ``curve`` exactly continuous with ``F(0) = 0`` by adjusting offsets only."""
    segs, worst = snap_chain(curve.segments, 0.0, max_shift)
    return curve.with_segments(segs), worst


# ---------------------------------------------------------------------------
# zeros and extrema


def _inward_slope_sign(seg: Segment, x: float, side: int) -> int:
    """Sign of the segment's derivative just inside it next to ``x``.

    ``side`` is -1 when ``x`` is the segment's right end, +1 for its left end.
    """
    if isinstance(seg, LinearSegment):
        s = seg.slope_
    else:
        width = seg.x_hi - seg.x_lo
        probe = x + side * min(1e-7, width / 4)
        # sign of -r*(x - x0) is all that matters; avoid the sqrt near vertical tangents
        s = -seg.r * (probe - seg.x0)
    return (s > 0) - (s < 0)


def positive_zeros(curve: OddPiecewiseCurve) -> list[float]:
    """All simple zeros of ``F`` on ``(0, x_end]``, ascending.

    Zeros are solved per segment in closed form, merged where two segments
    report the same joint, and each is checked for a sign change.
    """
    found = []
    for seg in curve.segments:
        for z in seg.zeros():
            if z > 1e-9:
                found.append(z)
    found.sort()
    merged: list[float] = []
    for z in found:
        if merged and z - merged[-1] < ZERO_MERGE_TOL:
            continue
        merged.append(z)

    end = curve.x_end
    for z in merged:
        delta = 1e-6 * max(1.0, z)
        left = curve(z - delta)
        if z + delta > end:
            # a partial curve ending on its zero: only the left side is known
            if left == 0.0:
                raise NonSimpleZero(f"F vanishes on a neighbourhood left of x={z!r}")
            continue
        right = curve(z + delta)
        if left * right >= 0.0:
            raise NonSimpleZero(f"F touches zero without changing sign at x={z!r}")
    return merged


def extrema(curve: OddPiecewiseCurve) -> list[tuple[float, float]]:
    """Interior local extrema of ``F`` on ``(0, x_end)`` as ``(x, F(x))``."""
    xs = []
    for seg in curve.segments:
        if isinstance(seg, ArcSegment) and seg.x_lo < seg.x0 < seg.x_hi and seg.r != 0.0:
            xs.append(seg.x0)
    for left, right in zip(curve.segments, curve.segments[1:]):
        x = right.x_lo
        if _inward_slope_sign(left, x, -1) * _inward_slope_sign(right, x, +1) < 0:
            xs.append(x)
    xs = sorted(x for x in xs if x > 0.0)
    out = []
    for x in xs:
        if out and x - out[-1][0] < 1e-12:
            continue
        out.append((x, curve(x)))
    return out


# ---------------------------------------------------------------------------
# validation


@dataclass
class JointResidual:
    x: float
    value_residual: float
    slope_residual: float | None


@dataclass
class ValidationReport:
    joints: list = field(default_factory=list)
    f0_residual: float = 0.0
    coverage_ok: bool = True
    complete: bool = True
    coverage_issues: list = field(default_factory=list)
    vertical_tangents: list = field(default_factory=list)
    value_tol: float = 1e-9
    c1_tol: float = 1e-6
    c1_declared: bool = True

    @property
    def max_value_residual(self) -> float:
        return max((j.value_residual for j in self.joints), default=0.0)

    @property
    def max_slope_residual(self) -> float:
        return max((j.slope_residual for j in self.joints if j.slope_residual is not None), default=0.0)

    @property
    def continuous(self) -> bool:
        return self.max_value_residual <= self.value_tol

    @property
    def c1_ok(self) -> bool:
        if not self.c1_declared:
            return True
        return all(j.slope_residual is not None and j.slope_residual <= self.c1_tol for j in self.joints)

    @property
    def ok(self) -> bool:
        # only continuity is a hard requirement; C1 is reported separately
        return self.coverage_ok and self.continuous and self.f0_residual < ORIGIN_TOL

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "continuous": self.continuous,
            "c1_ok": self.c1_ok,
            "coverage_ok": self.coverage_ok,
            "complete": self.complete,
            "f0_residual": self.f0_residual,
            "max_value_residual": self.max_value_residual,
            "max_slope_residual": self.max_slope_residual,
            "joints": [vars(j) for j in self.joints],
            "coverage_issues": self.coverage_issues,
            "vertical_tangents": self.vertical_tangents,
        }


def validate(curve: OddPiecewiseCurve, value_tol: float = 1e-9, c1_tol: float = 1e-6) -> ValidationReport:
    rep = ValidationReport(value_tol=value_tol, c1_tol=c1_tol, c1_declared=curve.c1)
    segs = curve.segments
    if segs[0].x_lo != 0.0:
        rep.coverage_ok = False
        rep.coverage_issues.append(f"first segment starts at {segs[0].x_lo}, not 0")
    for a, b in zip(segs, segs[1:]):
        if a.x_hi != b.x_lo:
            rep.coverage_ok = False
            kind = "gap" if a.x_hi < b.x_lo else "overlap"
            rep.coverage_issues.append(f"{kind} between {a.x_hi} and {b.x_lo}")
    for s in segs[:-1]:
        if math.isinf(s.x_hi):
            rep.coverage_ok = False
            rep.coverage_issues.append("only the last segment may extend to infinity")
    rep.complete = curve.is_complete

    rep.f0_residual = abs(segs[0].value(0.0)) if segs[0].x_lo == 0.0 else math.inf

    for a, b in zip(segs, segs[1:]):
        if a.x_hi != b.x_lo:
            continue
        x = b.x_lo
        vres = abs(a.value(x) - b.value(x))
        try:
            sres = abs(a.slope(x) - b.slope(x))
        except VerticalTangent:
            sres = None
        rep.joints.append(JointResidual(x, vres, sres))

    for s in segs:
        if isinstance(s, ArcSegment):
            for x in (s.x_lo, s.x_hi):
                arg = s.root_arg(x)
                if arg < -1e-9:
                    rep.coverage_issues.append(f"arc at [{s.x_lo}, {s.x_hi}] leaves its ellipse at x={x}")
                    rep.coverage_ok = False
                elif arg < NEAR_VERTICAL_ARG:
                    rep.vertical_tangents.append(x)
    return rep


# ---------------------------------------------------------------------------
# restoring force


@dataclass(frozen=True)
class RestoringFunction:
    """Odd polynomial ``g(x) = sum c_k x**e_k`` with ``c_k >= 0``, odd ``e_k``."""

    coeffs: tuple = ((1, 1.0),)

    def __post_init__(self):
        terms = tuple((int(e), float(c)) for e, c in self.coeffs)
        if not terms:
            raise ValueError("g needs at least one term")
        for e, c in terms:
            if e < 1 or e % 2 == 0:
                raise ValueError(f"g exponents must be odd positive integers, got {e}")
            if c < 0.0:
                raise ValueError(f"g coefficients must be nonnegative, got {c}")
        if not any(c > 0.0 for _, c in terms):
            raise ValueError("g needs at least one positive coefficient")
        object.__setattr__(self, "coeffs", terms)
        object.__setattr__(self, "is_identity", [t for t in terms if t[1] != 0.0] == [(1, 1.0)])

    def __call__(self, x: float) -> float:
        if self.is_identity:
            return x
        return sum(c * x**e for e, c in self.coeffs)

    def derivative(self, x: float) -> float:
        return sum(c * e * x ** (e - 1) for e, c in self.coeffs)

    def G(self, x: float) -> float:
        return sum(c * x ** (e + 1) / (e + 1) for e, c in self.coeffs)

    def to_dict(self) -> dict:
        return {"coeffs": [[e, c] for e, c in self.coeffs]}


def antiderivative_G(g: RestoringFunction, x: float) -> float:
    return g.G(x)
