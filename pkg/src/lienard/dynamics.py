"""Flow of the Liénard-plane system and its half-return map.

The system is ``x' = y - F(x)``, ``y' = -g(x)``.  Because ``F`` and ``g``
are odd, an orbit leaving ``(0, y0)`` closes up exactly when it meets the
negative y-axis at ``(0, -y0)``; the half-return map ``P`` records where it
does meet it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

from .curves import OddPiecewiseCurve, RestoringFunction
from .errors import MaxTimeExceeded, NoReturn
from .integrator import Event, IntegratorConfig, OrbitTrace, integrate

__all__ = [
    "IntegratorConfig",
    "LienardSystem",
    "OrbitTrace",
    "flow",
    "half_return",
    "potential_v",
    "integral_F_dy",
    "simulate",
    "write_trace_csv",
]


@dataclass(frozen=True)
class LienardSystem:
    F: OddPiecewiseCurve
    g: RestoringFunction = field(default_factory=RestoringFunction)
    name: str = ""
    # slope mismatch at joints accepted as C1; looser for curves built from rounded constants
    c1_tol: float = 1e-6

    def __post_init__(self):
        if not self.F.is_complete:
            raise ValueError("the damping curve F must be defined on all of [0, inf)")

    @property
    def breaks(self) -> tuple:
        """Abscissae where the vector field loses smoothness (the joints of F, both signs)."""
        js = self.F.joints()
        return tuple(js) + tuple(-j for j in js)

    def rhs(self, x: float, y: float) -> tuple:
        return y - self.F(x), -self.g(x)

    def potential(self, x: float, y: float) -> float:
        return self.g.G(x) + 0.5 * y * y


def potential_v(system: LienardSystem, x: float, y: float) -> float:
    return system.potential(x, y)


def flow(
    system: LienardSystem,
    start: tuple,
    config: IntegratorConfig | None = None,
    record: bool = True,
    t_end: float | None = None,
    events=(),
) -> OrbitTrace:
    """Integrate the system forward in time from ``start``."""
    return integrate(system.rhs, start, config, t_end=t_end, events=events, record=record,
                     x_breaks=system.breaks)


ESCAPE_FACTOR = 1e4


def _neg_y_axis_event() -> Event:
    return Event("neg_y_axis", lambda x, y: x, direction=-1, terminal=True, guard=lambda x, y: y < 0.0)


def _escape_event(y0: float) -> Event:
    r2 = (ESCAPE_FACTOR * max(1.0, y0)) ** 2
    return Event("escape", lambda x, y: x * x + y * y - r2, direction=+1, terminal=True)


def half_orbit(
    system: LienardSystem,
    y0: float,
    config: IntegratorConfig | None = None,
    record: bool = True,
    extra_events=(),
) -> OrbitTrace:
    """Trace from ``(0, y0)`` through the right half-plane to the negative y-axis.

    Raises :class:`NoReturn` (with ``escaped=True``) when the orbit leaves a
    disc of radius ``1e4 * max(1, y0)`` first.
    """
    if not y0 > 0.0:
        raise ValueError(f"y0 must be positive, got {y0!r}")
    try:
        trace = flow(system, (0.0, y0), config, record=record,
                     events=(_neg_y_axis_event(), _escape_event(y0), *extra_events))
    except MaxTimeExceeded as exc:
        raise NoReturn(f"orbit from (0, {y0!r}) did not reach the negative y-axis: {exc}") from exc
    if trace.hits("escape"):
        raise NoReturn(f"orbit from (0, {y0!r}) escapes to infinity without returning", escaped=True)
    return trace


def half_return(system: LienardSystem, y0: float, config: IntegratorConfig | None = None) -> float:
    """``P(y0)``: the distance below the origin where the orbit from ``(0, y0)`` returns."""
    trace = half_orbit(system, y0, config, record=False)
    return -trace.final[2]


def integral_F_dy(system: LienardSystem, trace: OrbitTrace) -> float:
    """Trapezoidal quadrature of ``∫ F(x) dy`` along the recorded samples.

    Along an orbit ``dv = F dy``, so over a half orbit this should match
    ``(P(y0)**2 - y0**2) / 2``.  Accuracy is that of the trapezoid rule on
    the recorded step sizes; integrate with a small ``max_step`` when using
    it as a check.
    """
    total = 0.0
    samples = trace.samples
    F = system.F
    f_prev = F(samples[0][1])
    for (_, _, y0), (_, x1, y1) in zip(samples, samples[1:]):
        f1 = F(x1)
        total += 0.5 * (f_prev + f1) * (y1 - y0)
        f_prev = f1
    return total


def simulate(system: LienardSystem, y0: float, turns: int, config: IntegratorConfig | None = None):
    """Integrate ``turns`` full revolutions starting from ``(0, y0)``.

    Returns the trace and the list of successive positive y-axis crossings
    (the start point included).
    """
    if not y0 > 0.0:
        raise ValueError(f"y0 must be positive, got {y0!r}")
    if turns < 1:
        raise ValueError("turns must be at least 1")
    ev = Event("pos_y_axis", lambda x, y: x, direction=+1, terminal=True, count=turns,
               guard=lambda x, y: y > 0.0)
    try:
        trace = flow(system, (0.0, y0), config, record=True, events=(ev,))
    except MaxTimeExceeded as exc:
        raise NoReturn(f"orbit from (0, {y0!r}) did not complete {turns} turn(s): {exc}") from exc
    crossings = [y0] + [h.y for h in trace.hits("pos_y_axis")]
    return trace, crossings


def write_trace_csv(trace: OrbitTrace, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "y"])
        for t, x, y in trace.samples:
            w.writerow([f"{t:.17g}", f"{x:.17g}", f"{y:.17g}"])


def vector_field_is_trivial(system: LienardSystem) -> bool:
    """True when ``F`` vanishes identically (the conservative case)."""
    return all(getattr(s, "slope_", None) == 0.0 and s.anchor_y == 0.0 for s in system.F.segments)
