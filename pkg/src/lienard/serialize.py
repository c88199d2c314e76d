"""JSON documents for curves, systems, plans and reports.

Numbers are written with ``repr`` precision (the :mod:`json` default), so a
dump/load round trip reproduces every float bit for bit.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path

from .construction import ExtensionPlan, StepSpec
from .curves import ArcSegment, LinearSegment, OddPiecewiseCurve, RestoringFunction, snap_offsets
from .dynamics import LienardSystem


def _num(v) -> float:
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "+inf", "infinity"):
            return math.inf
        raise ValueError(f"expected a number or 'inf', got {v!r}")
    return float(v)


def segment_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "arc":
        return ArcSegment(_num(d["x_lo"]), _num(d["x_hi"]), float(d["x0"]),
                          float(d["c"]), float(d["r"]), float(d["b"]))
    if kind == "linear":
        x_lo = _num(d["x_lo"])
        return LinearSegment(x_lo, _num(d["x_hi"]), float(d["slope"]),
                             float(d.get("anchor_x", x_lo)), float(d.get("anchor_y", 0.0)))
    raise ValueError(f"unknown segment kind {kind!r}")


def segments_from(value) -> tuple:
    """A single segment object or a list of them."""
    if isinstance(value, dict):
        return (segment_from_dict(value),)
    return tuple(segment_from_dict(d) for d in value)


def curve_from_dict(d: dict) -> OddPiecewiseCurve:
    curve = OddPiecewiseCurve(segments_from(d["segments"]), c1=bool(d.get("c1", True)))
    if d.get("snap_offsets"):
        curve, _ = snap_offsets(curve)
    return curve


def g_from_dict(d: dict | None) -> RestoringFunction:
    if not d:
        return RestoringFunction()
    return RestoringFunction(tuple((int(e), float(c)) for e, c in d["coeffs"]))


ROUNDED_C1_TOL = 1e-4


def system_from_dict(d: dict) -> LienardSystem:
    c1_tol = d.get("c1_tol", ROUNDED_C1_TOL if d.get("rounded_constants") else 1e-6)
    return LienardSystem(curve_from_dict(d), g_from_dict(d.get("g")), name=d.get("name", ""),
                         c1_tol=float(c1_tol))


def system_to_dict(system: LienardSystem) -> dict:
    out = {"name": system.name} if system.name else {}
    out.update(system.F.to_dict())
    out["g"] = system.g.to_dict()
    if system.c1_tol != 1e-6:
        out["c1_tol"] = system.c1_tol
    return out


def _phi_spec(v):
    if v is None or v == "auto":
        return "auto"
    if isinstance(v, dict) and "A" in v and "B" in v:
        return {"A": float(v["A"]), "B": float(v["B"])}
    raise ValueError(f"phi must be 'auto' or {{A, B}}, got {v!r}")


def plan_from_dict(d: dict) -> ExtensionPlan:
    f1 = OddPiecewiseCurve(segments_from(d["f1"]["segments"]), c1=bool(d["f1"].get("c1", True)))
    steps = []
    for s in d.get("steps", []):
        steps.append(StepSpec(
            a_next=float(s["a_next"]),
            L_next=float(s["L_next"]),
            target_left=segments_from(s["target_left"]),
            target_right=segments_from(s["target_right"]),
            phi_L=_phi_spec(s.get("phi_L", "auto")),
            phi_R=_phi_spec(s.get("phi_R", "auto")),
        ))
    tail = d.get("tail_slope", "auto")
    return ExtensionPlan(
        f1=f1,
        steps=steps,
        tail_slope=tail if tail == "auto" else float(tail),
        g=g_from_dict(d.get("g")),
        snap_offsets=bool(d.get("snap_offsets", False)),
        name=d.get("name", ""),
    )


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def dump_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, allow_nan=False) + "\n")


def load_system(path) -> LienardSystem:
    return system_from_dict(load_json(path))


def load_plan(path) -> ExtensionPlan:
    return plan_from_dict(load_json(path))


def bundled(name: str) -> Path:
    """Path of a bundled fixture such as ``example1.system.json``."""
    return Path(str(resources.files("lienard") / "data" / name))


def bundled_system(n: int) -> LienardSystem:
    return load_system(bundled(f"example{n}.system.json"))


def bundled_plan(n: int) -> ExtensionPlan:
    return load_plan(bundled(f"example{n}.plan.json"))
