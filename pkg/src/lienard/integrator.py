"""Adaptive Dormand-Prince 5(4) integration of planar autonomous systems.

Written on plain floats rather than numpy arrays: the state is two numbers
and the vector field is a piecewise scalar function, so array overhead would
dominate every step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

from scipy.optimize import brentq

from .errors import MaxTimeExceeded, StepUnderflow

Rhs = Callable[[float, float], tuple]

# Butcher tableau, Dormand & Prince (1980)
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40

SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 5.0


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = 0.5
    max_time: float = 1e3
    event_tol: float = 1e-12
    max_steps: int = 10_000_000

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step", "max_time", "event_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")


class Termination(Enum):
    NEG_Y_AXIS_CROSSING = "NegYAxisCrossing"
    EVENT = "Event"
    END_TIME = "EndTime"
    MAX_TIME = "MaxTime"
    MAX_STEPS = "MaxSteps"


@dataclass
class Event:
    """Zero crossing of ``fn(x, y)`` to watch for during integration.

    ``direction`` restricts detection to rising (+1) or falling (-1)
    crossings.  An event is only armed after ``|fn|`` has exceeded the
    event tolerance once, so a trajectory starting on the surface does not
    trigger immediately.  ``guard`` filters located crossings.  A terminal
    event stops the integration after ``count`` hits.
    """

    name: str
    fn: Callable[[float, float], float]
    direction: int = 0
    terminal: bool = False
    count: int = 1
    guard: Callable[[float, float], bool] | None = None


@dataclass
class EventHit:
    name: str
    t: float
    x: float
    y: float


@dataclass
class OrbitTrace:
    samples: list = field(default_factory=list)  # (t, x, y) tuples
    terminal_event: Termination = Termination.END_TIME
    events: list = field(default_factory=list)
    n_steps: int = 0
    n_rejected: int = 0

    @property
    def final(self) -> tuple:
        return self.samples[-1]

    def hits(self, name: str) -> list[EventHit]:
        return [e for e in self.events if e.name == name]


def dp_step(rhs: Rhs, x: float, y: float, k1x: float, k1y: float, h: float):
    """One Dormand-Prince step of size ``h``.

    Returns the 5th-order solution, the stage-7 slope (FSAL) and the
    embedded error estimate.
    """
    k2x, k2y = rhs(x + h * A21 * k1x, y + h * A21 * k1y)
    k3x, k3y = rhs(x + h * (A31 * k1x + A32 * k2x), y + h * (A31 * k1y + A32 * k2y))
    k4x, k4y = rhs(x + h * (A41 * k1x + A42 * k2x + A43 * k3x),
                   y + h * (A41 * k1y + A42 * k2y + A43 * k3y))
    k5x, k5y = rhs(x + h * (A51 * k1x + A52 * k2x + A53 * k3x + A54 * k4x),
                   y + h * (A51 * k1y + A52 * k2y + A53 * k3y + A54 * k4y))
    k6x, k6y = rhs(x + h * (A61 * k1x + A62 * k2x + A63 * k3x + A64 * k4x + A65 * k5x),
                   y + h * (A61 * k1y + A62 * k2y + A63 * k3y + A64 * k4y + A65 * k5y))
    xn = x + h * (B1 * k1x + B3 * k3x + B4 * k4x + B5 * k5x + B6 * k6x)
    yn = y + h * (B1 * k1y + B3 * k3y + B4 * k4y + B5 * k5y + B6 * k6y)
    k7x, k7y = rhs(xn, yn)
    ex = h * (E1 * k1x + E3 * k3x + E4 * k4x + E5 * k5x + E6 * k6x + E7 * k7x)
    ey = h * (E1 * k1y + E3 * k3y + E4 * k4y + E5 * k5y + E6 * k6y + E7 * k7y)
    return xn, yn, k7x, k7y, ex, ey


def _initial_step(rhs: Rhs, x: float, y: float, fx: float, fy: float, cfg: IntegratorConfig) -> float:
    sx = cfg.abs_tol + cfg.rel_tol * abs(x)
    sy = cfg.abs_tol + cfg.rel_tol * abs(y)
    d0 = math.hypot(x / sx, y / sy)
    d1 = math.hypot(fx / sx, fy / sy)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    return min(h0, cfg.max_step)


def integrate(
    rhs: Rhs,
    start: tuple,
    config: IntegratorConfig | None = None,
    *,
    t_end: float | None = None,
    events: Sequence[Event] = (),
    record: bool = True,
    x_breaks: Sequence[float] = (),
) -> OrbitTrace:
    """Integrate ``(x, y)' = rhs(x, y)`` forward from ``start`` at ``t = 0``.

    Stops at ``t_end`` if given, when a terminal event has fired its
    ``count`` times, or at ``config.max_time``.  Reaching ``max_time`` while
    a terminal event is still pending raises :class:`MaxTimeExceeded`.

    ``x_breaks`` lists abscissae where the vector field is not smooth; a
    step that would cross one is cut short so that it ends on the line
    ``x = const``, keeping every step inside a region where the field is
    smooth.
    """
    cfg = config or IntegratorConfig()
    x, y = float(start[0]), float(start[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"start must be finite, got {start!r}")
    stop_at = cfg.max_time if t_end is None else min(t_end, cfg.max_time)

    trace = OrbitTrace()
    t = 0.0
    if record:
        trace.samples.append((t, x, y))

    armed = [abs(ev.fn(x, y)) > cfg.event_tol for ev in events]
    hits = [0] * len(events)
    prev_g = [ev.fn(x, y) for ev in events]
    terminal_pending = any(ev.terminal for ev in events)

    breaks = sorted(set(float(b) for b in x_breaks))
    # side of each break line the state is on; 0 while sitting on it
    side = [(x > b) - (x < b) for b in breaks]

    fx, fy = rhs(x, y)
    h = _initial_step(rhs, x, y, fx, fy, cfg)
    rejected_last = False

    while True:
        if t >= stop_at:
            if terminal_pending and t_end is None:
                raise MaxTimeExceeded(f"no terminal event before t={cfg.max_time}")
            trace.terminal_event = Termination.END_TIME if t_end is not None and t_end <= cfg.max_time else Termination.MAX_TIME
            break
        if trace.n_steps >= cfg.max_steps:
            trace.terminal_event = Termination.MAX_STEPS
            break

        h = min(h, cfg.max_step, stop_at - t)
        if h < 1e-14 * max(1.0, abs(t)):
            raise StepUnderflow(f"step size {h:.3e} underflowed at t={t}")

        xn, yn, kx, ky, ex, ey = dp_step(rhs, x, y, fx, fy, h)
        sx = cfg.abs_tol + cfg.rel_tol * max(abs(x), abs(xn))
        sy = cfg.abs_tol + cfg.rel_tol * max(abs(y), abs(yn))
        err = math.sqrt(0.5 * ((ex / sx) ** 2 + (ey / sy) ** 2))

        if err > 1.0:
            trace.n_rejected += 1
            h *= max(FAC_MIN, SAFETY * err ** -0.2)
            rejected_last = True
            continue

        if breaks:
            cut = _first_break(rhs, breaks, side, x, y, fx, fy, xn, h, cfg.event_tol)
            if cut is not None:
                j, h, xn, yn, kx, ky = cut
                side = [(xn > b) - (xn < b) for b in breaks]
                side[j] = (xn > x) - (xn < x)

        # accepted: look for events inside (t, t + h]
        stop_here = None
        for i, ev in enumerate(events):
            g_new = ev.fn(xn, yn)
            g_old = prev_g[i]
            prev_g[i] = g_new
            if not armed[i]:
                if abs(g_new) > cfg.event_tol:
                    armed[i] = True
                continue
            crossed = (g_old > 0.0 >= g_new) if ev.direction < 0 else (
                (g_old < 0.0 <= g_new) if ev.direction > 0 else (g_old * g_new < 0.0 or (g_new == 0.0 and g_old != 0.0)))
            if not crossed:
                continue
            th, ex_, ey_ = _locate(rhs, ev.fn, x, y, fx, fy, h, g_old, cfg.event_tol)
            if ev.guard is not None and not ev.guard(ex_, ey_):
                continue
            trace.events.append(EventHit(ev.name, t + th, ex_, ey_))
            hits[i] += 1
            if ev.terminal and hits[i] >= ev.count:
                if stop_here is None or th < stop_here[0]:
                    stop_here = (th, ex_, ey_, ev)

        if stop_here is not None:
            th, ex_, ey_, ev = stop_here
            # drop any non-terminal hits past the stopping point
            trace.events = [e for e in trace.events if e.t <= t + th]
            t += th
            x, y = ex_, ey_
            trace.n_steps += 1
            trace.samples.append((t, x, y))
            trace.terminal_event = Termination.NEG_Y_AXIS_CROSSING if ev.name == "neg_y_axis" else Termination.EVENT
            return trace

        t += h
        x, y, fx, fy = xn, yn, kx, ky
        trace.n_steps += 1
        if record:
            trace.samples.append((t, x, y))

        fac = SAFETY * err ** -0.2 if err > 0.0 else FAC_MAX
        fac = min(FAC_MAX if not rejected_last else 1.0, max(FAC_MIN, fac))
        h *= fac
        rejected_last = False

    if not record:
        trace.samples.append((t, x, y))
    return trace


def _first_break(rhs, breaks, side, x, y, fx, fy, xn, h, tol):
    """Earliest break line crossed between ``x`` and ``xn``, or None."""
    lo, hi = (x, xn) if x <= xn else (xn, x)
    best = None
    for j, b in enumerate(breaks):
        if not lo <= b <= hi:
            continue
        s_new = (xn > b) - (xn < b)
        if side[j] == 0 or s_new == 0 or s_new == side[j]:
            continue
        if (x - b) * (xn - b) >= 0.0:
            continue
        th, bx, by = _locate(rhs, lambda u, v, b=b: u - b, x, y, fx, fy, h, x - b, tol)
        if best is None or th < best[1]:
            best = (j, th, bx, by)
    if best is None:
        return None
    j, th, bx, by = best
    if th >= h:
        return None
    kx, ky = rhs(bx, by)
    return j, th, bx, by, kx, ky


def _locate(rhs, fn, x, y, fx, fy, h, g_old, tol):
    """Find the sub-step ``theta`` in ``(0, h]`` where the event fires.

    Each trial re-integrates a single fresh step of size ``theta`` from the
    accepted state, so the located point carries the accuracy of the
    integrator itself rather than that of an interpolant.
    """

    def g(theta):
        if theta == 0.0:
            return g_old
        xn, yn = dp_step(rhs, x, y, fx, fy, theta)[:2]
        return fn(xn, yn)

    g_hi = g(h)
    if g_hi == 0.0:
        th = h
    else:
        th = brentq(g, 0.0, h, xtol=tol, rtol=4 * 2.220446049250313e-16, maxiter=200)
    xn, yn = dp_step(rhs, x, y, fx, fy, th)[:2]
    return th, xn, yn
