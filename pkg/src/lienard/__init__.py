"""Liénard systems ``x'' + f(x) x' + g(x) = 0`` with a prescribed number of limit cycles.

Build the damping curve from an extension plan, locate the cycles through the
half-return map, and check the hypotheses that pin their number down.
"""

from .construction import ExtensionPlan, StepSpec, build_phi, build_plan, odani_check
from .curves import ArcSegment, LinearSegment, OddPiecewiseCurve, RestoringFunction, extrema, positive_zeros
from .cycles import LimitCycle, Stability, alpha_bar, check_theorem, classify_stability, find_cycles
from .dynamics import LienardSystem, half_return, simulate
from .integrator import IntegratorConfig

__version__ = "0.1.0"

__all__ = [
    "ArcSegment", "ExtensionPlan", "IntegratorConfig", "LienardSystem", "LimitCycle",
    "LinearSegment", "OddPiecewiseCurve", "RestoringFunction", "Stability", "StepSpec",
    "alpha_bar", "build_phi", "build_plan", "check_theorem", "classify_stability",
    "extrema", "find_cycles", "half_return", "odani_check", "positive_zeros", "simulate",
]
