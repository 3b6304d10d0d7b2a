"""``delayloop`` command line: charts, tuning, Table 1, traces and margins.

Chart CSV coordinates: PI ``(h, h_i)`` at the given ``--tp``; SP
``(h, h_i*t_p)``; proposed ``(t_p, h_i)``.
"""

from __future__ import annotations

import argparse
import io
import math
import sys

import numpy as np

from . import proposed, sp_analytic, stability, tuning
from .core import ControllerGains, PlantModel, gains_to_physical, normalize_plant
from .errors import InfeasibleTuning, NumericalError, OverdampedError
from .mos_solver import control_output

EXIT_OK, EXIT_DEVIATION, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_NUMERIC = 0, 1, 2, 3, 4
PM_LEVELS = (30.0, 45.0, 60.0)


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return "%.9g" % x


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for r in rows:
        buf.write(",".join(fmt(x) for x in r) + "\n")
    return buf.getvalue()


def svg_text(curves, axes, title="") -> str:
    """Polylines on a 640x480 canvas with linear axes from the data extents."""
    W, H, M = 640, 480, 50
    pts = [c for c in curves if len(c[1])]
    allp = np.vstack([p for _, p in pts]) if pts else np.zeros((1, 2))
    x0, y0 = allp.min(axis=0)
    x1, y1 = allp.max(axis=0)
    x1 = x1 if x1 > x0 else x0 + 1.0
    y1 = y1 if y1 > y0 else y0 + 1.0

    def px(x, y):
        return (M + (x - x0) / (x1 - x0) * (W - 2 * M),
                H - M - (y - y0) / (y1 - y0) * (H - 2 * M))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
           f'viewBox="0 0 {W} {H}">',
           f'<rect width="{W}" height="{H}" fill="white"/>',
           f'<path d="M{M},{M} V{H - M} H{W - M}" stroke="black" fill="none"/>',
           f'<text x="{W / 2}" y="{H - 12}" text-anchor="middle">{axes[0]} '
           f'[{x0:.4g}, {x1:.4g}]</text>',
           f'<text x="14" y="{H / 2}" transform="rotate(-90 14 {H / 2})" '
           f'text-anchor="middle">{axes[1]} [{y0:.4g}, {y1:.4g}]</text>']
    if title:
        out.append(f'<text x="{W / 2}" y="24" text-anchor="middle">{title}</text>')
    for label, p in pts:
        coords = " ".join("%.2f,%.2f" % px(x, y) for x, y in p)
        out.append(f'<polyline points="{coords}" stroke="black" fill="none"/>')
        lx, ly = px(*p[-1])
        out.append(f'<text x="{lx + 4:.2f}" y="{ly:.2f}" font-size="11">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- commands

def _chart_curves(a) -> tuple[list, tuple]:
    c, n = a.controller, a.grid
    curves = []
    if c == "pi":
        _, h_p = stability.proportional_limit(a.tp)
        sweep = np.linspace(0.0, h_p * (1 - 1e-6), n)
        curves.append(tuning.trace_curve("stability", "pi", sweep, t_p=a.tp))
        for lv in PM_LEVELS:
            curves.append(tuning.trace_curve("phase_margin", "pi", sweep, lv, t_p=a.tp))
        over = np.linspace(0.0, 0.9 * h_p, n)
        curves.append(tuning.trace_curve("overshoot_y", "pi", over, a.poy, t_p=a.tp))
        curves.append(tuning.trace_curve("overshoot_v", "pi", over, a.pov, t_p=a.tp))
    elif c == "sp":
        sweep = np.linspace(0.05, 3.0, n)
        curves.append(tuning.trace_curve("damping", "sp", sweep))
        curves.append(tuning.trace_curve("overshoot_y", "sp", sweep, a.poy))
        curves.append(tuning.trace_curve("overshoot_v", "sp", sweep, a.pov))
    else:
        sweep = np.linspace(0.1, 10.0, n)
        curves.append(tuning.trace_curve("stability", "proposed", sweep))
        for lv in PM_LEVELS:
            curves.append(tuning.trace_curve("phase_margin", "proposed", sweep, lv))
        for kind, lv in (("overshoot_y", a.poy), ("overshoot_v", a.pov), ("steadiness", a.bs)):
            curves.append(tuning.trace_curve(kind, "proposed", sweep, lv, B_s=a.bs))
    return [(cv.label, cv.points) for cv in curves], tuning.AXES[c]


def cmd_chart(a):
    curves, axes = _chart_curves(a)
    if a.format == "svg":
        return svg_text(curves, axes, f"{a.controller} tuning chart")
    rows = [(lab, x, y) for lab, p in curves for x, y in p]
    return csv_text(("curve", "x", "y"), rows)


def _tuned(a) -> tuning.TunedPoint:
    if a.controller == "pi":
        return tuning.tune_pi(a.tp, a.poy, a.pov, a.ts)
    if a.controller == "sp":
        return tuning.tune_sp(a.tp, a.poy, a.pov, a.ts)
    return tuning.tune_proposed(a.tp, a.poy, a.bs, a.pov, a.ts)


def cmd_tune(a):
    p = _tuned(a)
    ix = p.indices
    header = ["controller", "t_p", "h", "h_i", "PO_y", "PO_v", "ISE", "PO_b", "active"]
    row = [p.controller, p.t_p, p.h, p.h_i, ix.PO_y, ix.PO_v, ix.ISE, ix.PO_b, p.active]
    if a.plant:
        K_p, K_i = gains_to_physical(ControllerGains(p.h, p.h_i), a.plant)
        header += ["K_p", "K_i"]
        row += [K_p, K_i]
    return csv_text(header, [row])


def cmd_table1(a):
    rows = tuning.reproduce_table1()
    keys = list(rows[0].deviations())
    header = (["t_p", "pi_h", "pi_h_i", "pi_PO_y", "pi_PO_v", "sp_h", "sp_h_i",
               "prop_h_i", "pi_ise", "sp_ise", "prop_ise"]
              + ["dev_" + k for k in keys] + ["failures"])
    out = []
    failed = False
    for r in rows:
        dev = r.deviations()
        fails = r.failures()
        failed |= bool(fails)
        out.append([r.t_p, r.pi.h, r.pi.h_i, r.pi.indices.PO_y, r.pi.indices.PO_v,
                    r.sp.h, r.sp.h_i, r.prop.h_i, r.ise_at_published["pi"],
                    r.ise_at_published["sp"], r.ise_at_published["proposed"]]
                   + [dev[k] for k in keys] + [" ".join(fails)])
    a._deviates = failed
    return csv_text(header, out)


def _series(a):
    t = np.linspace(0.0, a.ts, int(round(a.ts / 0.01)) + 1)
    if a.controller == "pi":
        _need(a, "h", "hi")
        resp = tuning.pi_response(a.tp, ControllerGains(a.h, a.hi), a.ts + 1.0)
        return t, resp(t), control_output(resp, a.tp, t)
    if a.controller == "sp":
        _need(a, "h", "hi")
        y, v = sp_analytic.sp_response(ControllerGains(a.h, a.hi), a.tp, t)
        return t, y, v
    _need(a, "hi")
    scn = proposed.ProposedScenario(a.tp, a.hi, a.bs, a.ts)
    second = proposed.second_mode_solve(scn, max(a.ts - scn.t_switch, 0.0) + 1.0)
    y = proposed.response(scn, second)(t)
    late = t >= scn.t_switch
    v = np.zeros_like(t)
    v[late] = control_output(second, a.tp, t[late] - scn.t_switch)
    return t, y, v


def cmd_simulate(a):
    t, y, v = _series(a)
    if a.format == "svg":
        return svg_text([("y", np.column_stack([t, y])), ("v", np.column_stack([t, v]))],
                        ("t", "y, v"), f"{a.controller} setpoint step 1 -> 0")
    return csv_text(("t", "y", "v"), zip(t, y, v))


def cmd_margins(a):
    z_a, h_u = stability.ultimate_gain(a.tp)
    z_p, h_p = stability.proportional_limit(a.tp)
    h = 0.0 if a.h is None else a.h
    header = ["t_p", "h", "z_a", "h_u", "z_p", "h_p", "h_i_max"]
    row = [a.tp, h, z_a, h_u, z_p, h_p, stability.hi_stability_bounds(h, a.tp).h_i_max]
    if a.hi is not None:
        m = stability.phase_margin(ControllerGains(h, a.hi), a.tp)
        header += ["h_i", "z_b", "PM_deg"]
        row += [a.hi, m.z_b, m.PM_deg]
    return csv_text(header, [row])


COMMANDS = {"chart": cmd_chart, "tune": cmd_tune, "table1": cmd_table1,
            "simulate": cmd_simulate, "margins": cmd_margins}


class UsageError(Exception):
    pass


def _need(a, *names):
    missing = ["--" + n for n in names if getattr(a, n) is None]
    if missing:
        raise UsageError(f"{a.command} --controller {a.controller} needs {' '.join(missing)}")


def _positive(s):
    x = float(s)
    if not (x > 0 and math.isfinite(x)):
        raise argparse.ArgumentTypeError(f"must be a positive number: {s}")
    return x


def _nonneg(s):
    x = float(s)
    if not (x >= 0 and math.isfinite(x)):
        raise argparse.ArgumentTypeError(f"must be a non-negative number: {s}")
    return x


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="delayloop", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--controller", choices=tuning.CONTROLLERS, default="pi")
    p.add_argument("--tp", type=_nonneg, help="normalized time constant T_p/L")
    p.add_argument("--plant", type=_positive, nargs=3, metavar=("K", "T_P", "L"),
                   help="physical plant; sets --tp and adds physical gains to tune output")
    p.add_argument("--h", type=_nonneg, help="normalized proportional gain K K_p")
    p.add_argument("--hi", type=_positive, help="normalized integral gain K K_i L")
    p.add_argument("--poy", type=_positive, default=tuning.PO_Y)
    p.add_argument("--pov", type=_positive, default=tuning.PO_V)
    p.add_argument("--bs", type=_positive, default=tuning.B_S)
    p.add_argument("--ts", type=_positive, default=tuning.T_S)
    p.add_argument("--grid", type=int, default=25, help="sweep points per chart curve")
    p.add_argument("--format", choices=("csv", "svg"), default="csv")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--strict", action="store_true",
                   help="table1: exit 1 if any cell is outside the acceptance tolerances")
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    if a.plant:
        a.plant = PlantModel(*a.plant)
        a.tp = normalize_plant(a.plant).t_p
    try:
        if a.tp is None and a.command not in ("table1",) and not (
                a.command == "chart" and a.controller != "pi"):
            raise UsageError(f"{a.command} needs --tp or --plant")
        if a.grid < 2:
            raise UsageError("--grid must be at least 2")
        if a.format == "svg" and a.command not in ("chart", "simulate"):
            raise UsageError("svg output is available for chart and simulate")
        text = COMMANDS[a.command](a)
    except UsageError as e:
        print(f"delayloop: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleTuning as e:
        print(f"delayloop: infeasible tuning: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NumericalError as e:
        print(f"delayloop: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OverdampedError) as e:
        print(f"delayloop: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if a.out:
        with open(a.out, "w", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    if a.strict and getattr(a, "_deviates", False):
        print("delayloop: table1 deviates beyond tolerance", file=sys.stderr)
        return EXIT_DEVIATION
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
