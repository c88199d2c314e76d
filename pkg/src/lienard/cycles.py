"""Locating limit cycles and checking the exactly-N-cycles hypotheses.

Cycles are fixed points of the half-return map: ``delta(y0) = P(y0) - y0``
is scanned on a grid, every sign change is bracketed and refined, and each
fixed point is traced once more to read off where the cycle meets the
x-axis and how far it reaches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .curves import LinearSegment, extrema, positive_zeros, validate
from .dynamics import LienardSystem, half_orbit, half_return
from .errors import NonSimpleZero, NoReturn, NoRootInInterval, ScanTooCoarse
from .integrator import Event, IntegratorConfig

SCAN_EPS = 1e-3
SCAN_POINTS = 200
REFINE_BELOW = 1e-3
REFINE_DEPTH = 6
FIXED_POINT_TOL = 1e-10
DEGENERATE_TOL = 1e-8


class Stability(Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    NEUTRAL = "Neutral"


@dataclass
class LimitCycle:
    index: int
    y0: float
    alpha_cross: float
    amplitude: float
    stability: Stability = Stability.NEUTRAL
    residual: float = 0.0
    half_period: float = 0.0
    trace: object = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "y0": self.y0,
            "alpha_cross": self.alpha_cross,
            "amplitude": self.amplitude,
            "stability": self.stability.value,
            "residual": self.residual,
            "half_period": self.half_period,
        }


@dataclass
class AlphaBar:
    interval_index: int
    value: float
    residual: float
    roots: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"interval_index": self.interval_index, "value": self.value,
                "residual": self.residual, "roots": self.roots}


@dataclass
class CycleScan:
    cycles: list
    notes: list
    y_grid: np.ndarray
    deltas: np.ndarray
    y_max: float


def default_y_max(system: LienardSystem) -> float:
    """Twice the level ``y`` with ``2 G(y) = (1.5 a_N)**2``; ``3 a_N`` when ``g(x) = x``."""
    try:
        zs = positive_zeros(system.F)
    except NonSimpleZero:  # F vanishes on a whole segment
        zs = []
    reach = 1.5 * (zs[-1] if zs else 1.0)
    target = reach * reach
    G = system.g.G
    hi = 1.0
    while 2.0 * G(hi) < target:
        hi *= 2.0
    y = brentq(lambda v: 2.0 * G(v) - target, 0.0, hi, xtol=1e-14)
    return 2.0 * y


ESCAPED = 1e6  # stand-in for delta when the orbit runs off to infinity


def _delta(system, cfg):
    def f(y):
        try:
            return half_return(system, y, cfg) - y
        except NoReturn as exc:
            if exc.escaped:
                return ESCAPED
            raise
    return f


def scan_cycles(
    system: LienardSystem,
    y_max: float | None = None,
    config: IntegratorConfig | None = None,
    grid: int = SCAN_POINTS,
    eps: float = SCAN_EPS,
    classify: bool = True,
) -> CycleScan:
    """Scan ``delta = P - id`` over ``(eps, y_max]`` and refine every fixed point."""
    cfg = config or IntegratorConfig()
    y_max = y_max or default_y_max(system)
    if not y_max > eps:
        raise ValueError(f"y_max={y_max} must exceed the scan start {eps}")
    delta = _delta(system, cfg)
    ys = np.linspace(eps, y_max, grid)
    ds = np.array([delta(float(y)) for y in ys])
    notes: list = []

    if np.all(np.abs(ds) <= DEGENERATE_TOL * np.maximum(1.0, ys)):
        notes.append("DegenerateContinuum: P(y0) = y0 across the whole scan; closed orbits form a continuum")
        return CycleScan([], notes, ys, ds, y_max)

    _refine_near_misses(delta, ys, ds)

    brackets = [(ys[i], ys[i + 1], ds[i], ds[i + 1]) for i in range(grid - 1)
                if ds[i] == 0.0 or ds[i] * ds[i + 1] < 0.0]
    cycles = []
    for k, (lo, hi, dlo, dhi) in enumerate(brackets, start=1):
        y0 = float(lo) if dlo == 0.0 else brentq(delta, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        cycles.append(trace_cycle(system, y0, k, cfg))
    if classify:
        for c in cycles:
            c.stability = classify_stability(system, c, cfg)
    if not cycles:
        notes.append("no sign change of P(y0) - y0 on the scan grid")
    return CycleScan(cycles, notes, ys, ds, y_max)


def _refine_near_misses(delta, ys, ds):
    """Halve the cells around shallow local minima of ``|delta|``.

    A pair of close fixed points can hide inside one cell, leaving only a dip
    in ``|delta|``.  If halving reveals a sign change there the grid was too
    coarse and :class:`ScanTooCoarse` is raised.
    """
    a = np.abs(ds)
    for i in range(1, len(ys) - 1):
        if not (a[i] < REFINE_BELOW and a[i] <= a[i - 1] and a[i] <= a[i + 1]):
            continue
        if ds[i - 1] * ds[i] <= 0.0 or ds[i] * ds[i + 1] <= 0.0:
            continue
        for lo, hi in ((ys[i - 1], ys[i]), (ys[i], ys[i + 1])):
            pts = np.linspace(lo, hi, 2**REFINE_DEPTH + 1)[1:-1]
            vals = np.array([delta(float(y)) for y in pts])
            if np.any(vals * ds[i] < 0.0):
                raise ScanTooCoarse(
                    f"two fixed points of P hide in the grid cell [{lo:.6g}, {hi:.6g}]; increase the grid size")


def trace_cycle(system: LienardSystem, y0: float, index: int = 1,
                config: IntegratorConfig | None = None) -> LimitCycle:
    """Follow the half orbit from ``(0, y0)`` and measure it."""
    cfg = config or IntegratorConfig()
    F = system.F
    events = (
        Event("x_axis", lambda x, y: y, direction=-1, guard=lambda x, y: x > 0.0),
        Event("turn", lambda x, y: y - F(x), direction=-1, guard=lambda x, y: x > 0.0),
    )
    tr = half_orbit(system, y0, cfg, record=True, extra_events=events)
    crossings = tr.hits("x_axis")
    turns = tr.hits("turn")
    alpha = crossings[0].x if crossings else math.nan
    xs = [s[1] for s in tr.samples] + [e.x for e in turns]
    amplitude = max(xs)
    p = -tr.final[2]
    return LimitCycle(index=index, y0=y0, alpha_cross=alpha, amplitude=amplitude,
                      residual=p - y0, half_period=tr.final[0], trace=tr)


def find_cycles(system: LienardSystem, y_max: float | None = None,
                config: IntegratorConfig | None = None, grid: int = SCAN_POINTS) -> list:
    return scan_cycles(system, y_max, config, grid).cycles


def classify_stability(system: LienardSystem, cycle: LimitCycle,
                       config: IntegratorConfig | None = None) -> Stability:
    """Sign of ``P'(y0) - 1`` from a central difference with step ``1e-5 y0``."""
    h = 1e-5 * cycle.y0
    slope = (half_return(system, cycle.y0 + h, config) - half_return(system, cycle.y0 - h, config)) / (2 * h)
    if slope < 1.0 - 1e-3:
        return Stability.STABLE
    if slope > 1.0 + 1e-3:
        return Stability.UNSTABLE
    return Stability.NEUTRAL


def alpha_bar(system: LienardSystem, y0: float, interval: tuple, index: int = 0,
              samples: int = 2000) -> AlphaBar:
    """Largest root of ``2 G(a) + F(a)**2 = y0**2`` inside ``interval``.

    Both defining equations of the estimate coincide on a closed orbit,
    where the two y-axis crossings agree, so a single equation is solved;
    if it has several roots in the interval the largest is kept.
    """
    lo, hi = interval
    F, G = system.F, system.g.G
    target = y0 * y0

    def h(a):
        fa = F(a)
        return 2.0 * G(a) + fa * fa - target

    xs = np.linspace(lo, hi, samples)
    vals = np.array([h(float(x)) for x in xs])
    roots = []
    for i in range(samples - 1):
        if vals[i] == 0.0:
            roots.append(float(xs[i]))
        elif vals[i] * vals[i + 1] < 0.0:
            roots.append(brentq(h, xs[i], xs[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps))
    if vals[-1] == 0.0:
        roots.append(float(xs[-1]))
    if not roots:
        raise NoRootInInterval(f"2G(a) + F(a)^2 = {y0}^2 has no root in ({lo}, {hi})")
    best = max(roots)
    return AlphaBar(index, best, abs(h(best)), roots)


# ---------------------------------------------------------------------------
# theorem hypotheses


@dataclass
class Condition:
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"passed": self.passed, **self.detail}


@dataclass
class TheoremReport:
    zeros: list
    extrema: list
    alpha_bars: list
    condition_i: Condition
    condition_ii: Condition
    condition_iii: Condition
    condition_iv: Condition
    localization: Condition
    cycle_count_expected: int
    cycles_found: list
    notes: list = field(default_factory=list)

    @property
    def conditions_pass(self) -> bool:
        return all(c.passed for c in (self.condition_i, self.condition_ii,
                                      self.condition_iii, self.condition_iv))

    @property
    def count_matches(self) -> bool:
        return len(self.cycles_found) == self.cycle_count_expected

    @property
    def all_pass(self) -> bool:
        return self.conditions_pass and self.count_matches

    def to_dict(self) -> dict:
        return json_safe({
            "all_pass": self.all_pass,
            "conditions_pass": self.conditions_pass,
            "order": "cycles located first, then alpha-bar estimates from each cycle's y0",
            "zeros": self.zeros,
            "extrema": [{"x": x, "F": v} for x, v in self.extrema],
            "alpha_bars": [a.to_dict() for a in self.alpha_bars],
            "condition_i": self.condition_i.to_dict(),
            "condition_ii": self.condition_ii.to_dict(),
            "condition_iii": self.condition_iii.to_dict(),
            "condition_iv": self.condition_iv.to_dict(),
            "localization": self.localization.to_dict(),
            "cycle_count_expected": self.cycle_count_expected,
            "cycles_found": [c.to_dict() for c in self.cycles_found],
            "notes": self.notes,
        })


def json_safe(obj):
    """Replace NaN/inf by ``None`` so reports stay strict JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_safe(v) for v in obj]
    return obj


def _sign_constant(values) -> bool:
    s = np.sign(np.asarray(values, dtype=float))
    s = s[s != 0]
    return bool(s.size == 0 or np.all(s == s[0]))


def check_theorem(
    system: LienardSystem,
    config: IntegratorConfig | None = None,
    y_max: float | None = None,
    grid: int = SCAN_POINTS,
    value_tol: float = 1e-9,
    c1_tol: float | None = None,
    scan: CycleScan | None = None,
) -> TheoremReport:
    """Evaluate the hypotheses of the exactly-N-cycles theorem for ``system``.

    Cycles are located first; each estimate ``alpha_bar_i`` is then computed
    from the i-th cycle's crossing ``y0``.  ``value_tol``/``c1_tol`` bound the
    joint residuals accepted as continuity of ``F`` and of ``f = F'``;
    ``c1_tol`` defaults to the system's own tolerance.
    """
    F, g = system.F, system.g
    notes = []

    if c1_tol is None:
        c1_tol = system.c1_tol
    rep = validate(F, value_tol=value_tol, c1_tol=c1_tol)
    cond_i = Condition(rep.ok and rep.c1_ok and rep.complete, {
        "max_value_residual": rep.max_value_residual,
        "max_slope_residual": rep.max_slope_residual,
        "value_tol": value_tol, "c1_tol": c1_tol,
    })

    odd_g = all(e % 2 == 1 for e, _ in g.coeffs)
    cond_ii = Condition(odd_g and rep.f0_residual < 1e-12, {
        "F_odd": "by construction (odd reflection)",
        "g_odd_positive": odd_g and any(c > 0 for _, c in g.coeffs),
        "F0_residual": rep.f0_residual,
    })

    try:
        zeros = positive_zeros(F)
        simple = True
    except NonSimpleZero as exc:
        zeros, simple = [], False
        notes.append(str(exc))
    ext = extrema(F)
    N = len(zeros)

    if scan is None:
        scan = scan_cycles(system, y_max, config, grid)
    cycles = scan.cycles
    notes.extend(scan.notes)

    # extremum bookkeeping: L0 in (0, a1), L_i in (a_i, a_{i+1})
    bounds = [0.0] + zeros
    L = []
    unique = True
    for i in range(N):
        lo, hi = bounds[i], bounds[i + 1]
        inside = [x for x, _ in ext if lo < x < hi]
        if not inside:
            unique = False
            L.append(math.nan)
            continue
        # the last interval only needs a first extremum
        if len(inside) > 1 and 0 < i < N - 1:
            unique = False
        L.append(inside[0])

    alpha_bars = []
    below_L = []
    for i in range(1, N):
        if i - 1 >= len(cycles):
            below_L.append(False)
            notes.append(f"no cycle located to supply y0 for alpha_bar_{i}")
            continue
        try:
            ab = alpha_bar(system, cycles[i - 1].y0, (zeros[i - 1], zeros[i]), index=i)
        except NoRootInInterval as exc:
            below_L.append(False)
            notes.append(str(exc))
            continue
        alpha_bars.append(ab)
        below_L.append(ab.value < L[i])

    cond_iii = Condition(simple and N >= 1 and unique and all(below_L), {
        "N": N,
        "zeros_simple": simple,
        "unique_extrema": unique,
        "L": L,
        "alpha_bar_below_L": below_L,
    })

    # (iv) F monotone on (a_i, alpha_bar_i], |F| -> inf monotonically beyond a_N
    mono = []
    for ab in alpha_bars:
        a_i = zeros[ab.interval_index - 1]
        xs = np.linspace(a_i, ab.value, 101)[1:]
        mono.append(_sign_constant([F.derivative(float(x)) for x in xs]))
    tail = F.segments[-1]
    tail_ok = False
    if N and isinstance(tail, LinearSegment) and abs(tail.slope_) > 1e-9:
        a_N = zeros[-1]
        xs = np.linspace(a_N, max(tail.x_lo, a_N) + 1.0, 201)[1:]
        d = [F.derivative(float(x)) for x in xs]
        tail_ok = bool(_sign_constant(d) and np.sign(d[-1]) == np.sign(F(float(xs[-1]))))
    cond_iv = Condition(bool(all(mono) and tail_ok), {
        "monotone_on_a_i_alpha_bar": mono,
        "tail_unbounded_monotone": bool(tail_ok),
        "tail_slope": getattr(tail, "slope_", None),
    })

    # proof claim: cycle i meets the x-axis in (abar_{i-1}, abar_i], abar_0 = L0
    marks = [L[0] if L else math.nan] + [a.value for a in alpha_bars]
    inside = []
    for k, c in enumerate(cycles):
        lo = marks[k] if k < len(marks) else math.nan
        hi = marks[k + 1] if k + 1 < len(marks) else math.inf
        inside.append(bool(lo < c.alpha_cross <= hi))
    loc = Condition(bool(inside) and all(inside) and len(cycles) == N, {
        "bounds": marks,
        "alpha_cross": [c.alpha_cross for c in cycles],
        "inside": inside,
    })

    return TheoremReport(
        zeros=zeros, extrema=ext, alpha_bars=alpha_bars,
        condition_i=cond_i, condition_ii=cond_ii, condition_iii=cond_iii, condition_iv=cond_iv,
        localization=loc, cycle_count_expected=N, cycles_found=cycles, notes=notes,
    )
