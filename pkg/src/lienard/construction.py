"""Interval-by-interval extension of a damping curve known near the origin.

Starting from ``f1`` on ``[0, a1]`` each step appends the restriction of
``F`` to ``[a_k, a_{k+1}]``.  The abscissa map ``phi`` carries the previous
interval onto the new one (split at the extrema), and the ordinate map ``H``
is *induced* by the chosen target pieces through ``H(f_k(s)) = f*(phi(s))``.
The target pieces therefore are the extension; ``H`` is materialised as a
sampled graph and checked for monotonicity and sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy.optimize import brentq

from .curves import (
    ArcSegment,
    LinearSegment,
    OddPiecewiseCurve,
    RestoringFunction,
    Segment,
    extrema,
    positive_zeros,
    snap_chain,
    snap_offsets,
)
from .errors import (
    DegenerateInterval,
    HNotMonotone,
    JointMismatch,
    NonMonotone,
    PlanError,
    SignViolation,
    ZeroSlope,
)

H_GRID = 512
PHI_TOL = 1e-12
# plan-supplied map constants are usually rounded, so explicit maps get this slack
PHI_TOL_EXPLICIT = 1e-6
SNAP_TOL = 1e-4
JOINT_TOL = 1e-9


@dataclass(frozen=True)
class PhiMap:
    """``phi(s) = sqrt(A s**2 + B)`` restricted to ``[s_lo, s_hi]``."""

    A: float
    B: float
    s_lo: float
    s_hi: float

    def __post_init__(self):
        if not self.s_lo < self.s_hi:
            raise DegenerateInterval(f"phi source interval [{self.s_lo}, {self.s_hi}] is empty")
        if self.A <= 0.0:
            raise NonMonotone(f"phi with A={self.A} is not increasing on [{self.s_lo}, {self.s_hi}]")
        if self.A * self.s_lo**2 + self.B < 0.0:
            raise NonMonotone(f"phi is undefined at s={self.s_lo} (A s^2 + B < 0)")

    def __call__(self, s):
        return np.sqrt(self.A * np.square(s) + self.B)

    def derivative(self, s):
        return self.A * s / self(s)

    @property
    def t_lo(self) -> float:
        return float(self(self.s_lo))

    @property
    def t_hi(self) -> float:
        return float(self(self.s_hi))

    def to_dict(self) -> dict:
        return {"A": self.A, "B": self.B, "s_lo": self.s_lo, "s_hi": self.s_hi}


def build_phi(s_lo: float, s_hi: float, t_lo: float, t_hi: float) -> PhiMap:
    """Solve ``phi(s_lo) = t_lo`` and ``phi(s_hi) = t_hi`` for ``A`` and ``B``.

    >>> m = build_phi(0.0, 0.1, 0.2, 0.3)
    >>> round(m.A, 12), round(m.B, 12)
    (5.0, 0.04)
    """
    if s_lo == s_hi:
        raise DegenerateInterval(f"source interval collapses at s={s_lo}")
    if not 0.0 <= s_lo < s_hi:
        raise DegenerateInterval(f"need 0 <= s_lo < s_hi, got [{s_lo}, {s_hi}]")
    if t_lo < 0.0 or (t_lo == 0.0 and s_lo != 0.0):
        raise DegenerateInterval(f"target start must be positive, got {t_lo}")
    A = (t_hi * t_hi - t_lo * t_lo) / (s_hi * s_hi - s_lo * s_lo)
    if A <= 0.0:
        raise NonMonotone(f"no increasing phi maps [{s_lo}, {s_hi}] onto [{t_lo}, {t_hi}] (A={A})")
    B = t_lo * t_lo - A * s_lo * s_lo
    return PhiMap(A, B, s_lo, s_hi)


# ---------------------------------------------------------------------------
# plan description


PhiSpec = Union[str, dict]


@dataclass
class StepSpec:
    """One extension step as written in a plan file."""

    a_next: float
    L_next: float
    target_left: tuple
    target_right: tuple
    phi_L: PhiSpec = "auto"
    phi_R: PhiSpec = "auto"


@dataclass
class ExtensionPlan:
    f1: OddPiecewiseCurve
    steps: list
    tail_slope: Union[float, str] = "auto"
    g: RestoringFunction = field(default_factory=RestoringFunction)
    snap_offsets: bool = False
    name: str = ""


@dataclass(frozen=True)
class ExtensionStep:
    a_prev: float
    L_prev: float
    a_cur: float
    L_next: float
    a_next: float
    phi_L: PhiMap
    phi_R: PhiMap
    target_left: tuple
    target_right: tuple

    def __post_init__(self):
        pts = (self.a_prev, self.L_prev, self.a_cur, self.L_next, self.a_next)
        if not all(p < q for p, q in zip(pts, pts[1:])):
            raise PlanError(
                "need a_prev < L_prev < a_cur < L_next < a_next, got "
                + " < ".join(f"{p:.6g}" for p in pts))

    @property
    def targets(self) -> tuple:
        return self.target_left + self.target_right


@dataclass
class HBranch:
    s: np.ndarray
    u: np.ndarray  # f_k(s)
    h: np.ndarray  # f*_{k+1}(phi(s)) = H(u)

    def is_decreasing(self, slack: float = 1e-14) -> bool:
        du = np.diff(self.u)
        dh = np.diff(self.h)
        return bool(np.all(du * dh <= slack * slack))

    def sign_ok(self) -> bool:
        inner = slice(1, -1)
        return bool(np.all(self.u[inner] * self.h[inner] < 0.0))

    def value_at_zero(self) -> float:
        """``H`` at ``u = 0``: the sample whose ``u`` is closest to zero."""
        return float(self.h[np.argmin(np.abs(self.u))])


@dataclass
class InducedH:
    left: HBranch
    right: HBranch
    identity_residual: float = 0.0

    @property
    def monotone(self) -> bool:
        return self.left.is_decreasing() and self.right.is_decreasing()

    @property
    def sign_ok(self) -> bool:
        return self.left.sign_ok() and self.right.sign_ok()


# ---------------------------------------------------------------------------
# building steps


def _end_at_zero(segments: Sequence[Segment], declared: float) -> list:
    """Move the last segment's end onto its exact zero nearest ``declared``."""
    segs = list(segments)
    last = segs[-1]
    if isinstance(last, ArcSegment):
        lo, hi = last.x_lo, declared + SNAP_TOL
        probe = ArcSegment(lo, hi, last.x0, last.c, last.r, last.b)
        zs = [z for z in probe.zeros() if abs(z - declared) <= SNAP_TOL]
    else:
        zs = [z for z in LinearSegment(last.x_lo, declared + SNAP_TOL, last.slope_,
                                       last.anchor_x, last.anchor_y).zeros()
              if abs(z - declared) <= SNAP_TOL]
    if not zs:
        raise JointMismatch(f"segment ending at {declared} has no zero within {SNAP_TOL} of it")
    z = min(zs, key=lambda v: abs(v - declared))
    if z <= last.x_lo:
        raise JointMismatch(f"zero {z} falls before the segment start {last.x_lo}")
    if isinstance(last, ArcSegment):
        segs[-1] = ArcSegment(last.x_lo, z, last.x0, last.c, last.r, last.b)
    else:
        segs[-1] = LinearSegment(last.x_lo, z, last.slope_, last.anchor_x, last.anchor_y)
    return segs


def _with_bounds(seg: Segment, x_lo: float, x_hi: float) -> Segment:
    if isinstance(seg, ArcSegment):
        return ArcSegment(x_lo, x_hi, seg.x0, seg.c, seg.r, seg.b)
    return LinearSegment(x_lo, x_hi, seg.slope_, seg.anchor_x, seg.anchor_y)


def prepare_f1(curve: OddPiecewiseCurve, snap: bool = False) -> OddPiecewiseCurve:
    """Normalise the seed curve: optional offset snapping, end pinned to its zero a1."""
    if curve.is_complete:
        raise PlanError("f1 must be given on a bounded interval [0, a1]")
    if snap:
        curve, _ = snap_offsets(curve, SNAP_TOL)
    elif abs(curve(0.0)) > 1e-12:
        raise JointMismatch(f"f1(0) = {curve(0.0):.3e}, expected 0")
    return curve.with_segments(_end_at_zero(curve.segments, curve.x_end))


def _resolve_phi(spec: PhiSpec, s_lo, s_hi, t_lo, t_hi) -> PhiMap:
    if spec == "auto" or spec is None:
        return build_phi(s_lo, s_hi, t_lo, t_hi)
    m = PhiMap(float(spec["A"]), float(spec["B"]), s_lo, s_hi)
    if abs(m.t_lo - t_lo) > PHI_TOL_EXPLICIT or abs(m.t_hi - t_hi) > PHI_TOL_EXPLICIT:
        raise PlanError(
            f"explicit phi maps [{s_lo}, {s_hi}] to [{m.t_lo}, {m.t_hi}], expected [{t_lo}, {t_hi}]")
    return m


def _last_interval(curve: OddPiecewiseCurve) -> tuple:
    """``(a_prev, L_prev, a_cur)`` for the last zero-to-zero interval of a partial curve."""
    zs = positive_zeros(curve)
    a_cur = curve.x_end
    if not zs or abs(zs[-1] - a_cur) > 1e-9:
        raise JointMismatch(f"curve must end on a zero, ends at {a_cur} with F={curve(a_cur):.3e}")
    a_prev = zs[-2] if len(zs) > 1 else 0.0
    inside = [x for x, _ in extrema(curve) if a_prev < x < a_cur]
    if len(inside) != 1:
        raise PlanError(f"expected exactly one extremum in ({a_prev}, {a_cur}), found {inside}")
    return a_prev, inside[0], a_cur


def make_step(current: OddPiecewiseCurve, spec: StepSpec) -> ExtensionStep:
    """Turn a plan step into a concrete :class:`ExtensionStep` for ``current``.

    The target pieces are re-anchored onto the actual end ``a_k`` of the
    current curve, their offsets made exactly continuous and the last one
    cut at its own zero, so rounded input constants do not leave slivers.
    """
    a_prev, L_prev, a_cur = _last_interval(current)
    if not spec.a_next > a_cur:
        raise PlanError(f"a_next={spec.a_next} must exceed the current end a_k={a_cur}")
    if not a_cur < spec.L_next < spec.a_next:
        raise PlanError(f"L_next={spec.L_next} must lie in ({a_cur}, {spec.a_next})")

    left = list(spec.target_left)
    right = list(spec.target_right)
    if not left or not right:
        raise PlanError("each step needs left and right target pieces")
    segs = left + right
    if abs(segs[0].x_lo - a_cur) > SNAP_TOL:
        raise JointMismatch(f"targets start at {segs[0].x_lo}, current curve ends at {a_cur}")
    raw = segs[0].value(a_cur)
    if abs(raw) > SNAP_TOL:
        raise JointMismatch(f"f*_(k+1)(a_k) = {raw:.3e} at a_k={a_cur}, expected 0")

    segs[0] = _with_bounds(segs[0], a_cur, segs[0].x_hi)
    segs, _ = snap_chain(segs, 0.0, SNAP_TOL)
    segs = _end_at_zero(segs, spec.a_next)
    a_next = segs[-1].x_hi
    left, right = segs[: len(left)], segs[len(left):]
    if abs(left[-1].x_hi - spec.L_next) > 1e-12 or abs(right[0].x_lo - spec.L_next) > 1e-12:
        raise PlanError(f"left targets must end and right targets start at L_next={spec.L_next}")

    phi_L = _resolve_phi(spec.phi_L, a_prev, L_prev, a_cur, spec.L_next)
    phi_R = _resolve_phi(spec.phi_R, L_prev, a_cur, spec.L_next, a_next)
    return ExtensionStep(a_prev, L_prev, a_cur, spec.L_next, a_next, phi_L, phi_R, tuple(left), tuple(right))


def _eval_segments(segs: Sequence[Segment], xs: np.ndarray) -> np.ndarray:
    out = np.empty_like(xs)
    los = [s.x_lo for s in segs]
    for i, x in enumerate(xs):
        k = max(np.searchsorted(los, x, side="right") - 1, 0)
        out[i] = segs[k].value(float(x))
    return out


def extend_once(current: OddPiecewiseCurve, step: ExtensionStep, grid: int = H_GRID):
    """Append ``f_{k+1}`` to ``current`` and return ``(extended, induced_H)``.

    Raises :class:`JointMismatch` if the new piece does not start at zero,
    :class:`SignViolation` if it does not have the opposite sign to the
    previous piece, and :class:`HNotMonotone` if the induced ``H`` fails to
    decrease along either branch.
    """
    if abs(current.x_end - step.a_cur) > 1e-12:
        raise JointMismatch(f"step starts at {step.a_cur}, curve ends at {current.x_end}")
    targets = step.targets
    for a, b in zip(targets, targets[1:]):
        if a.x_hi != b.x_lo:
            raise PlanError(f"target pieces leave a gap or overlap at {a.x_hi}/{b.x_lo}")
    if targets[0].x_lo != step.a_cur or targets[-1].x_hi != step.a_next:
        raise PlanError("target pieces must cover [a_k, a_{k+1}] exactly")

    start = targets[0].value(step.a_cur)
    if abs(start - current(step.a_cur)) > JOINT_TOL or abs(start) > JOINT_TOL:
        raise JointMismatch(f"f_(k+1)(a_k) = {start:.3e}, expected 0")

    src_sign = math.copysign(1.0, current(step.L_prev))
    probe = np.linspace(step.a_cur, step.a_next, 258)[1:-1]
    vals = _eval_segments(targets, probe)
    if not np.all(vals * src_sign < 0.0):
        bad = probe[vals * src_sign >= 0.0]
        raise SignViolation(
            f"new piece must keep the sign opposite to f_k on ({step.a_cur}, {step.a_next}); fails at x={bad[0]:.6g}")

    extended = current.with_segments(current.segments + targets)

    def branch(phi: PhiMap, lo: float, hi: float) -> HBranch:
        s = np.linspace(lo, hi, grid)
        u = np.array([current(float(v)) for v in s])
        h = _eval_segments(targets, phi(s))
        return HBranch(s, u, h)

    H = InducedH(branch(step.phi_L, step.a_prev, step.L_prev),
                 branch(step.phi_R, step.L_prev, step.a_cur))
    # H(f_k(s)) must reproduce the extended curve at phi(s) by definition
    resid = 0.0
    for br, phi in ((H.left, step.phi_L), (H.right, step.phi_R)):
        on_curve = np.array([extended(float(v)) for v in phi(br.s)])
        resid = max(resid, float(np.max(np.abs(on_curve - br.h))))
    H.identity_residual = resid

    if not H.left.is_decreasing() or not H.right.is_decreasing():
        raise HNotMonotone(f"induced H is not monotone decreasing on step ending at {step.a_next}")
    if not H.sign_ok:
        raise SignViolation(f"induced H violates s*H(s) < 0 on step ending at {step.a_next}")
    return extended, H


def append_tail(curve: OddPiecewiseCurve, slope: Union[float, str] = "auto") -> OddPiecewiseCurve:
    """Close the curve with a line through ``(a_N, 0)`` running to infinity.

    ``"auto"`` matches the left derivative at ``a_N`` so the result is C1.
    """
    if curve.is_complete:
        raise PlanError("curve already has a tail")
    a_N = curve.x_end
    if abs(curve(a_N)) > JOINT_TOL:
        raise JointMismatch(f"curve must end on a zero, F({a_N}) = {curve(a_N):.3e}")
    left_slope = curve.derivative(a_N)
    if slope == "auto":
        slope = left_slope
    slope = float(slope)
    if abs(slope) < 1e-9:
        raise ZeroSlope(f"tail slope {slope:.3e} would not make |F| grow without bound")
    if slope * left_slope < 0.0:
        raise SignViolation(f"tail slope {slope} turns F back at a_N={a_N}, making the zero non-simple")
    return curve.with_segments(curve.segments + (LinearSegment(a_N, math.inf, slope, a_N, 0.0),))


@dataclass
class BuiltPlan:
    curve: OddPiecewiseCurve
    steps: list
    induced: list
    plan: ExtensionPlan

    def joint_report(self) -> list:
        out = []
        for step in self.steps:
            x = step.a_cur
            left = [s for s in self.curve.segments if s.x_hi == x][0]
            right = step.targets[0]
            out.append({
                "x": x,
                "value_residual": abs(left.value(x) - right.value(x)),
                "slope_residual": abs(left.slope(x) - right.slope(x)),
            })
        return out


def build_plan(plan: ExtensionPlan) -> BuiltPlan:
    """Run every step of ``plan`` and close the curve with its tail.

    Errors raised by a step are re-raised with the (1-based) step index
    prefixed to the message.
    """
    curve = prepare_f1(plan.f1, plan.snap_offsets)
    steps, induced = [], []
    for k, spec in enumerate(plan.steps, start=1):
        try:
            step = make_step(curve, spec)
            curve, H = extend_once(curve, step)
        except Exception as exc:
            if hasattr(exc, "code"):
                raise type(exc)(f"step {k}: {exc}") from exc
            raise
        steps.append(step)
        induced.append(H)
    curve = append_tail(curve, plan.tail_slope)
    return BuiltPlan(curve, steps, induced, plan)


# ---------------------------------------------------------------------------
# Odani's choice-function condition


@dataclass
class PhiVerdict:
    step: int
    side: str
    A: float
    B: float
    A_at_least_one: bool | None  # only meaningful for g(x) = x
    choice_condition: bool        # g(phi) phi' >= g, sampled


@dataclass
class EqualityReport:
    step: int
    s_range: tuple
    interior_loci: list
    endpoint_equal: list
    pattern: list  # (s_lo, s_hi, sign of |H(f)| - |f|)
    verdict: str   # "holds", "fails" or "piecewise"

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "s_range": list(self.s_range),
            "interior_loci": self.interior_loci,
            "endpoint_equal": self.endpoint_equal,
            "pattern": [{"s_lo": a, "s_hi": b, "sign": sg} for a, b, sg in self.pattern],
            "verdict": self.verdict,
        }


@dataclass
class OdaniReport:
    phis: list
    equality: list

    @property
    def condition_11(self) -> str:
        """Verdict of ``|H1L(f1L(s))| >= |f1L(s)|`` on the first step."""
        return self.equality[0].verdict

    def to_dict(self) -> dict:
        return {
            "phi": [vars(p) for p in self.phis],
            "equality": [e.to_dict() for e in self.equality],
            "condition_11": self.condition_11,
        }


def _equality_on_left_branch(curve, step: ExtensionStep, k: int, grid: int, zero_tol: float) -> EqualityReport:
    lo, hi = step.a_prev, step.L_prev

    def D(s: float) -> float:
        return abs(curve(float(step.phi_L(s)))) - abs(curve(s))

    s = np.linspace(lo, hi, grid)
    d = np.array([D(float(v)) for v in s])
    zero = np.abs(d) <= zero_tol

    loci = [float(v) for v, z in zip(s, zero) if z]
    for i in range(grid - 1):
        if zero[i] or zero[i + 1]:
            continue
        if d[i] * d[i + 1] < 0.0:
            loci.append(float(brentq(D, s[i], s[i + 1], xtol=1e-13, rtol=1e-15)))
    loci.sort()

    endpoint = [v for v in loci if v in (lo, hi)]
    interior = [v for v in loci if lo < v < hi]

    cuts = [lo] + interior + [hi]
    pattern = []
    for a, b in zip(cuts, cuts[1:]):
        mask = (s > a) & (s < b) & ~zero
        if np.any(mask):
            sign = int(np.sign(np.median(d[mask])))
        else:
            sign = int(np.sign(D(0.5 * (a + b))))
        pattern.append((a, b, sign))

    signs = {p[2] for p in pattern}
    if signs <= {0, 1}:
        verdict = "holds"
    elif signs <= {0, -1}:
        verdict = "fails"
    else:
        verdict = "piecewise"
    return EqualityReport(k, (lo, hi), interior, endpoint, pattern, verdict)


def odani_check(built: BuiltPlan, g: RestoringFunction | None = None,
                grid: int = H_GRID, zero_tol: float = 1e-12) -> OdaniReport:
    """Compare the construction against Odani's choice-function condition.

    For every phi map this reports the solved ``A`` (for ``g(x) = x`` the
    condition reduces to ``A >= 1``) together with a sampled check of
    ``g(phi(s)) phi'(s) >= g(s)``.  For the left branch of every step it
    locates where ``|H(f(s))| = |f(s)|`` and summarises the sign of
    ``|H(f(s))| - |f(s)|`` between those points.
    """
    g = g or built.plan.g
    phis = []
    for k, step in enumerate(built.steps, start=1):
        for side, phi in (("L", step.phi_L), ("R", step.phi_R)):
            s = np.linspace(phi.s_lo, phi.s_hi, grid)
            lhs = np.array([g(float(p)) for p in phi(s)]) * phi.derivative(s)
            rhs = np.array([g(float(v)) for v in s])
            ok = bool(np.all(lhs >= rhs - 1e-12))
            phis.append(PhiVerdict(k, side, phi.A, phi.B,
                                   (phi.A >= 1.0) if g.is_identity else None, ok))
    equality = [_equality_on_left_branch(built.curve, step, k, grid, zero_tol)
                for k, step in enumerate(built.steps, start=1)]
    return OdaniReport(phis, equality)
