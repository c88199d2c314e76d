"""Command-line front end: ``lienard <command> ...``.

Every failure prints one line ``error: CODE: message`` on stderr and exits
nonzero.  ``check`` exits 0 only when every hypothesis holds and the number
of located cycles equals the number of positive zeros of ``F``.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .construction import build_plan, odani_check
from .curves import positive_zeros
from .cycles import LimitCycle, Stability, alpha_bar, check_theorem, json_safe, scan_cycles
from .dynamics import LienardSystem, simulate, write_trace_csv
from .errors import LienardError, NonSimpleZero, NoRootInInterval
from .integrator import IntegratorConfig
from .serialize import dump_json, load_json, load_plan, load_system, plan_from_dict, system_to_dict

EXIT_FAIL = 1
EXIT_ERROR = 2


class CliError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # single-line usage errors
        raise CliError("USAGE", message)


def _positive(name):
    def conv(text):
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {text!r}") from None
        if not (v > 0 and math.isfinite(v)):
            raise argparse.ArgumentTypeError(f"{name} must be positive, got {text!r}")
        return v
    return conv


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _config(args) -> IntegratorConfig:
    kw = {}
    env = os.environ.get("LIENARD_RTOL")
    if env:
        kw["rel_tol"] = _positive("LIENARD_RTOL")(env)
    if getattr(args, "rtol", None) is not None:
        kw["rel_tol"] = args.rtol
    if getattr(args, "atol", None) is not None:
        kw["abs_tol"] = args.atol
    if getattr(args, "max_time", None) is not None:
        kw["max_time"] = args.max_time
    return IntegratorConfig(**kw)


def _add_integrator(p):
    p.add_argument("--rtol", type=_positive("--rtol"), help="relative tolerance (default 1e-10, env LIENARD_RTOL)")
    p.add_argument("--atol", type=_positive("--atol"), help="absolute tolerance (default 1e-12)")
    p.add_argument("--max-time", type=_positive("--max-time"), help="give up on an orbit after this time")


def _add_scan(p):
    p.add_argument("--ymax", type=_positive("--ymax"), help="upper end of the y0 scan")
    p.add_argument("--grid", type=_positive_int, default=200, help="scan points (default 200)")


def _emit(obj, path=None):
    if path:
        dump_json(obj, path)
    else:
        print(json.dumps(obj, indent=2, allow_nan=False))


def _sibling(path, suffix):
    p = Path(path)
    return p.with_name(p.stem + suffix)


# ---------------------------------------------------------------------------


def cmd_construct(args) -> int:
    built = build_plan(load_plan(args.plan))
    dump_json(built_system_doc(built), args.out)
    summary = {
        "out": str(args.out),
        "zeros": positive_zeros(built.curve),
        "joints": built.joint_report(),
        "induced_H": [
            {"step": k, "monotone": h.monotone, "sign_ok": h.sign_ok,
             "identity_residual": h.identity_residual}
            for k, h in enumerate(built.induced, start=1)
        ],
        "tail_slope": built.curve.segments[-1].slope_,
    }
    print(json.dumps(summary, indent=2, allow_nan=False))
    return 0


def built_system_doc(built) -> dict:
    plan = built.plan
    return system_to_dict(LienardSystem(built.curve, plan.g, name=plan.name))


def cycles_report(system, scan) -> dict:
    """JSON document for a cycle scan: cycles plus the alpha-bar estimates."""
    try:
        zeros = positive_zeros(system.F)
    except NonSimpleZero:
        zeros = []
    bars = []
    for i in range(1, len(zeros)):
        if i - 1 < len(scan.cycles):
            try:
                bars.append(alpha_bar(system, scan.cycles[i - 1].y0, (zeros[i - 1], zeros[i]), index=i).to_dict())
            except NoRootInInterval as exc:
                bars.append({"interval_index": i, "error": str(exc)})
    return json_safe({
        "system": system.name,
        "y_max": scan.y_max,
        "zeros": zeros,
        "cycles": [c.to_dict() for c in scan.cycles],
        "alpha_bars": bars,
        "notes": scan.notes,
    })


def _write_scan_csv(scan, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["y0", "delta"])
        for y, d in zip(scan.y_grid, scan.deltas):
            w.writerow([f"{y:.17g}", f"{d:.17g}"])


def cmd_find_cycles(args) -> int:
    system = load_system(args.system)
    cfg = _config(args)
    scan = scan_cycles(system, args.ymax, cfg, args.grid)
    report = cycles_report(system, scan)
    _emit(report, args.report)
    if args.report and not args.no_figures:
        from .plotting import plot_return_map, plot_system
        _write_scan_csv(scan, _sibling(args.report, ".scan.csv"))
        plot_system(system, scan.cycles, _sibling(args.report, ".cycles.svg"), cfg)
        plot_return_map(scan.y_grid, scan.deltas, _sibling(args.report, ".delta.svg"), scan.cycles)
    return 0


def cmd_check(args) -> int:
    system = load_system(args.system)
    report = check_theorem(system, _config(args), args.ymax, args.grid, c1_tol=args.c1_tol)
    doc = report.to_dict()
    _emit(doc, args.report)
    if args.report:
        print(json.dumps({"all_pass": report.all_pass}))
    return 0 if report.all_pass else EXIT_FAIL


def cmd_simulate(args) -> int:
    system = load_system(args.system)
    trace, crossings = simulate(system, args.y0, args.turns, _config(args))
    write_trace_csv(trace, args.csv)
    print(json.dumps({"csv": str(args.csv), "samples": len(trace.samples),
                      "crossings": crossings, "final": list(trace.final)}, allow_nan=False))
    return 0


def _cycles_from_report(doc) -> list:
    out = []
    for c in doc.get("cycles", []):
        out.append(LimitCycle(index=int(c["index"]), y0=float(c["y0"]),
                              alpha_cross=float(c.get("alpha_cross", math.nan)),
                              amplitude=float(c.get("amplitude", c["y0"])),
                              stability=Stability(c.get("stability", "Neutral"))))
    return out


def cmd_plot(args) -> int:
    from .plotting import plot_system
    system = load_system(args.system)
    cfg = _config(args)
    if args.report:
        cycles = _cycles_from_report(load_json(args.report))
    else:
        cycles = scan_cycles(system, args.ymax, cfg, args.grid).cycles
    plot_system(system, cycles, args.svg, cfg)
    print(json.dumps({"svg": str(args.svg), "cycles": len(cycles)}))
    return 0


def cmd_odani(args) -> int:
    plan = plan_from_dict(load_json(args.plan))
    report = odani_check(build_plan(plan)).to_dict()
    _emit(report, args.report)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lienard", description="Liénard systems with a prescribed number of limit cycles.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("construct", help="build a system from an extension plan")
    c.add_argument("--plan", required=True)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_construct)

    f = sub.add_parser("find-cycles", help="locate limit cycles; writes JSON, scan CSV and SVG figures")
    f.add_argument("--system", required=True)
    f.add_argument("--report", help="JSON report path (stdout when omitted)")
    f.add_argument("--no-figures", action="store_true", help="skip the CSV/SVG written next to the report")
    _add_scan(f)
    _add_integrator(f)
    f.set_defaults(func=cmd_find_cycles)

    k = sub.add_parser("check", help="verify the theorem hypotheses; exit 0 iff all hold")
    k.add_argument("--system", required=True)
    k.add_argument("--report")
    k.add_argument("--c1-tol", type=_positive("--c1-tol"), help="joint slope tolerance (default from the system)")
    _add_scan(k)
    _add_integrator(k)
    k.set_defaults(func=cmd_check)

    s = sub.add_parser("simulate", help="integrate whole turns and write a t,x,y CSV")
    s.add_argument("--system", required=True)
    s.add_argument("--y0", type=_positive("--y0"), required=True)
    s.add_argument("--turns", type=_positive_int, default=1)
    s.add_argument("--csv", required=True)
    _add_integrator(s)
    s.set_defaults(func=cmd_simulate)

    g = sub.add_parser("plot", help="SVG of F and the limit cycles")
    g.add_argument("--system", required=True)
    g.add_argument("--report", help="find-cycles report to draw from (scans when omitted)")
    g.add_argument("--svg", required=True)
    _add_scan(g)
    _add_integrator(g)
    g.set_defaults(func=cmd_plot)

    o = sub.add_parser("odani", help="compare a built plan with the Odani choice-function condition")
    o.add_argument("--plan", required=True)
    o.add_argument("--report")
    o.set_defaults(func=cmd_odani)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CliError as exc:
        code, msg = exc.code, str(exc)
    except LienardError as exc:
        code, msg = exc.code, str(exc)
    except FileNotFoundError as exc:
        code, msg = "IO_ERROR", f"{exc.strerror}: {exc.filename}"
    except OSError as exc:
        code, msg = "IO_ERROR", str(exc)
    except json.JSONDecodeError as exc:
        code, msg = "PARSE_ERROR", str(exc)
    except (KeyError, TypeError, ValueError) as exc:
        code, msg = "INVALID_INPUT", f"{type(exc).__name__}: {exc}"
    print(f"error: {code}: {' '.join(msg.split())}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
