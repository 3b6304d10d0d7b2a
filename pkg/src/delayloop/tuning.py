"""Tuning-chart curves, the three tuning procedures, and Table 1.

Chart coordinates per controller:

* PI:       ``(h, h_i)`` at a fixed ``t_p``;
* SP:       ``(h, h_i t_p)``, independent of ``t_p``;
* proposed: ``(t_p, h_i)``.

Each curve is traced by fixing the sweep coordinate and locating the level
crossing in the other one.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import indices, proposed, sp_analytic, stability
from .core import ControllerGains, PerformanceIndices
from .errors import InfeasibleTuning, OverdampedError
from .mos_solver import constant_history, control_output, solve

CONTROLLERS = ("pi", "sp", "proposed")
KINDS = ("stability", "phase_margin", "overshoot_y", "overshoot_v", "steadiness", "damping")
SYMBOLS = {"stability": "Gamma_s", "phase_margin": "Gamma_p", "overshoot_y": "Gamma_y",
           "overshoot_v": "Gamma_v", "steadiness": "Gamma_b", "damping": "Gamma_d"}
AXES = {"pi": ("h", "h_i"), "sp": ("h", "h_i*t_p"), "proposed": ("t_p", "h_i")}

PO_Y = 0.0105
PO_V = 0.10
B_S = 0.02
T_S = 7.0

# Table 1 as printed: t_p, PI (h, h_i), SP (h, h_i), proposed h_i, ISE (PI, SP, proposed).
TABLE1 = (
    (0.10, 0.45, 0.787, 1.239, 18.490, 0.017, 1.524, 1.083, 1.051),
    (0.25, 0.50, 0.738, 1.239, 7.396, 0.037, 1.674, 1.207, 1.125),
    (0.40, 0.60, 0.724, 1.239, 4.622, 0.126, 1.788, 1.331, 1.200),
    (0.55, 0.70, 0.737, 1.239, 3.362, 0.169, 1.869, 1.456, 1.275),
    (0.70, 0.92, 0.763, 1.239, 2.641, 0.212, 1.945, 1.580, 1.350),
    (0.85, 1.10, 0.766, 1.239, 2.175, 0.254, 2.037, 1.704, 1.425),
    (1.00, 1.15, 0.744, 1.239, 1.849, 0.272, 2.129, 1.829, 1.500),
    (2.50, 2.10, 0.682, 1.239, 0.740, 0.318, 2.939, 3.069, 2.240),
    (4.00, 3.00, 0.654, 1.239, 0.462, 0.333, 3.582, 4.175, 2.900),
    (5.50, 3.80, 0.633, 1.239, 0.336, 0.412, 4.077, 4.971, 3.440),
    (7.00, 4.75, 0.628, 1.239, 0.264, 0.512, 4.458, 5.503, 3.870),
    (8.50, 6.00, 0.640, 1.239, 0.218, 0.611, 4.754, 5.862, 4.214),
    (10.00, 6.65, 0.622, 1.239, 0.185, 0.711, 4.993, 6.110, 4.494),
)
#: The SP rows share one chart point; the printed h_i column is this product over t_p, rounded.
SP_CHART_POINT = (1.239, 1.849)


@dataclass(frozen=True, eq=False)
class ChartCurve:
    kind: str
    controller: str
    level: float | None
    points: np.ndarray
    missing: tuple[float, ...] = ()
    t_p: float | None = None

    @property
    def axes(self) -> tuple[str, str]:
        return AXES[self.controller]

    @property
    def label(self) -> str:
        sym = SYMBOLS[self.kind]
        if self.level is None:
            return sym
        unit = "deg" if self.kind == "phase_margin" else ""
        return f"{sym}({self.level:g}{unit})"


@dataclass(frozen=True)
class TunedPoint:
    controller: str
    t_p: float
    h: float
    h_i: float
    indices: PerformanceIndices
    active: str = ""
    slack: dict = field(default_factory=dict)


# ---------------------------------------------------------------- indices

def pi_response(t_p: float, g: ControllerGains, t_end: float = T_S + 1.0):
    """Exact PI response to a 1 -> 0 setpoint step from steady state."""
    return solve(constant_history(1.0, t_p), g, t_p, t_end, setpoint=0.0,
                 setpoint_before=1.0)


def pi_indices(t_p: float, h: float, h_i: float, t_s: float = T_S) -> PerformanceIndices:
    resp = pi_response(t_p, ControllerGains(h, h_i), t_s + 1.0)
    n = int(round(t_s / indices.CONFORMING_DT)) + 1
    tr = indices.sample(resp, t_s, n, lambda t: control_output(resp, t_p, t))
    po_y, po_v = indices.overshoots(tr)
    return PerformanceIndices(PO_y=po_y, PO_v=po_v, ISE=indices.ise_trapezoid(tr))


def sp_indices(t_p: float, h: float, h_i: float, t_s: float = T_S) -> PerformanceIndices:
    g = ControllerGains(h, h_i)
    po_y, po_v = sp_analytic.sp_overshoots(g, t_p)
    return PerformanceIndices(PO_y=po_y, PO_v=po_v, ISE=sp_analytic.sp_ise(g, t_p, t_s))


def proposed_indices(t_p: float, h_i: float, B_s: float = B_S,
                     t_s: float = T_S) -> PerformanceIndices:
    scn = proposed.ProposedScenario(t_p=t_p, h_i=h_i, B_s=B_s, t_s=t_s)
    second = proposed.second_mode_solve(scn)
    po_y, po_v = proposed.proposed_overshoots(scn, second)
    return PerformanceIndices(PO_y=po_y, PO_v=po_v,
                              ISE=proposed.proposed_ise(scn, second),
                              PO_b=proposed.steadiness_index(scn, second))


def _index(kind: str, controller: str, x: float, y: float, t_p, B_s: float) -> float:
    """Index named by ``kind`` at chart coordinates ``(x, y)``."""
    if controller == "pi":
        ix = pi_indices(t_p, x, y)
    elif controller == "sp":
        ix = sp_indices(1.0, x, y)
    else:
        ix = proposed_indices(x, y, B_s)
    return {"overshoot_y": ix.PO_y, "overshoot_v": ix.PO_v, "steadiness": ix.PO_b}[kind]


def _pm_deg(h: float, h_i: float, t_p: float) -> float:
    return stability.phase_margin(ControllerGains(h, h_i), t_p).PM_deg


def _first_crossing(f, lo: float, hi: float, n_scan: int, xtol: float) -> float | None:
    """Smallest root of ``f`` on ``[lo, hi]`` found on a uniform scan, then polished."""
    xs = np.linspace(lo, hi, n_scan)
    fa = f(xs[0])
    for a, b in zip(xs, xs[1:]):
        fb = f(b)
        if fa == 0:
            return float(a)
        if (fa < 0) != (fb < 0):
            return float(brentq(f, a, b, xtol=xtol, rtol=1e-15))
        fa = fb
    return None


def _hi_range(controller: str, sweep: float, t_p) -> tuple[float, float]:
    if controller == "pi":
        hmax = stability.hi_stability_bounds(sweep, t_p).h_i_max
    else:
        hmax = stability.hi_stability_bounds(0.0, sweep).h_i_max
    return hmax * 1e-4, hmax * (1 - 1e-9)


def trace_curve(kind: str, controller: str, sweep, level: float | None = None,
                t_p: float | None = None, B_s: float = B_S,
                n_scan: int = 12) -> ChartCurve:
    """Sample one chart curve at the given sweep values.

    ``level`` is in degrees for phase-margin curves and an index magnitude
    otherwise.  Sweep values with no crossing inside the stable range are
    reported in ``missing``.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown curve kind {kind!r}")
    if controller not in CONTROLLERS:
        raise ValueError(f"unknown controller {controller!r}")
    if controller == "pi" and t_p is None:
        raise ValueError("PI charts need t_p")
    if controller == "sp" and kind in ("stability", "phase_margin", "steadiness"):
        raise ValueError(f"{SYMBOLS[kind]} is not drawn on the SP chart")
    if kind == "damping" and controller != "sp":
        raise ValueError("Gamma_d belongs to the SP chart")
    if kind == "steadiness" and controller != "proposed":
        raise ValueError("Gamma_b belongs to the proposed controller chart")
    if kind == "steadiness" and level is None:
        level = B_s
    if kind not in ("stability", "damping") and level is None:
        raise ValueError(f"{SYMBOLS[kind]} needs a level")

    pts, missing = [], []
    for s in np.asarray(sweep, dtype=float):
        try:
            y = _solve_curve_point(kind, controller, float(s), level, t_p, B_s, n_scan)
        except (ValueError, OverdampedError):
            y = None
        if y is None:
            missing.append(float(s))
        else:
            pts.append((float(s), y))
    return ChartCurve(kind=kind, controller=controller, level=level,
                      points=np.array(pts, dtype=float).reshape(-1, 2),
                      missing=tuple(missing), t_p=t_p)


def _solve_curve_point(kind, controller, s, level, t_p, B_s, n_scan):
    if kind == "damping":
        return (1.0 + s) ** 2 / 4.0
    if kind == "stability":
        if controller == "pi":
            return stability.hi_stability_bounds(s, t_p).h_i_max
        return stability.hi_stability_bounds(0.0, s).h_i_max
    if controller == "sp":
        lo = (1.0 + s) ** 2 / 4.0 * (1 + 1e-9)
        f = lambda X: _index(kind, "sp", s, X, None, B_s) - level
        hi = lo * 2.0
        while f(hi) < 0:
            hi *= 2.0
            if hi > 1e6:
                return None
        # Overshoots vanish on the damping borderline and grow with X.
        return float(brentq(f, lo * (1 + 1e-6), hi, xtol=1e-13, rtol=1e-15))
    lo, hi = _hi_range(controller, s, t_p)
    if kind == "phase_margin":
        tp_ = t_p if controller == "pi" else s
        h = s if controller == "pi" else 0.0
        f = lambda x: level - _pm_deg(h, x, tp_)
        return _first_crossing(f, lo, hi, 64, 1e-13)
    if controller == "pi":
        f = lambda x: _index(kind, "pi", s, x, t_p, B_s) - level
    else:
        f = lambda x: _index(kind, "proposed", s, x, None, B_s) - level
    return _first_crossing(f, lo, hi, n_scan, 1e-10)


# ---------------------------------------------------------------- tuning

def tune_sp(t_p: float, po_y: float = PO_Y, po_v: float = PO_V, t_s: float = T_S) -> TunedPoint:
    """Intersection of the SP overshoot curves, mapped back to ``h_i`` for this ``t_p``."""
    if not t_p > 0:
        raise ValueError("t_p must be > 0")

    def on_gy(h):
        return _solve_curve_point("overshoot_y", "sp", h, po_y, None, B_S, 0)

    def gap(h):
        return sp_indices(1.0, h, on_gy(h)).PO_v - po_v

    lo, hi = 1e-3, 1.0
    while gap(hi) < 0:
        hi *= 2.0
        if hi > 1e3:
            raise InfeasibleTuning("Gamma_y and Gamma_v do not intersect")
    if gap(lo) > 0:
        raise InfeasibleTuning("PO_v exceeds its preset all along Gamma_y")
    h = stability.bisect(gap, lo, hi, xtol=1e-13)
    X = on_gy(h)
    ix = sp_indices(t_p, h, X / t_p, t_s)
    return TunedPoint("sp", t_p, h, X / t_p, ix, active="PO_y+PO_v")


def tune_proposed(t_p: float, po_y: float = PO_Y, B_s: float = B_S,
                  po_v: float = PO_V, t_s: float = T_S) -> TunedPoint:
    """Integral gain giving the preset overshoot, checked against the band and PO_v curves."""
    if not t_p > 0:
        raise ValueError("t_p must be > 0")
    f = lambda x: proposed_indices(t_p, x, B_s, t_s).PO_y - po_y
    lo, hi = _hi_range("proposed", t_p, None)
    h_i = _first_crossing(f, lo, hi, 16, 1e-10)
    if h_i is None:
        raise InfeasibleTuning(f"no stable h_i reaches PO_y = {po_y} at t_p = {t_p}")
    ix = proposed_indices(t_p, h_i, B_s, t_s)
    if ix.PO_b > B_s * (1 + 1e-9):
        raise InfeasibleTuning(f"tuning point leaves the +-{B_s} band (PO_b = {ix.PO_b:.5g})")
    if ix.PO_v > po_v:
        raise InfeasibleTuning(f"tuning point lies above Gamma_v (PO_v = {ix.PO_v:.5g})")
    return TunedPoint("proposed", t_p, 0.0, h_i, ix, active="PO_y",
                      slack={"PO_v": po_v - ix.PO_v, "PO_b": B_s - ix.PO_b})


def _pi_boundary(t_p, h, po_y, po_v, n_scan=10):
    """Largest-ISE-reducing feasible ``h_i`` at ``h``: the first crossing of
    ``max(PO_y - po_y, (PO_v - po_v) po_y / po_v)`` as ``h_i`` grows."""
    lo, hi = _hi_range("pi", h, t_p)

    def c(x):
        ix = pi_indices(t_p, h, x)
        return max(ix.PO_y - po_y, (ix.PO_v - po_v) * po_y / po_v)

    return _first_crossing(c, lo, hi, n_scan, 1e-9)


def tune_pi(t_p: float, po_y: float = PO_Y, po_v: float = PO_V, t_s: float = T_S,
            n_grid: int = 24, h_tol: float = 1e-3) -> TunedPoint:
    """Minimum-ISE point with ``PO_y <= po_y`` and ``PO_v <= po_v``.

    For each ``h`` the feasible set is ``h_i`` below the first level crossing;
    ISE falls with ``h_i`` there, so the candidate is that crossing.  The ISE
    along this boundary is scanned on ``n_grid`` values of ``h`` and refined
    by bounded golden-section search to ``h_tol``.
    """
    if not t_p > 0:
        raise ValueError("t_p must be > 0")
    _, h_p = stability.proportional_limit(t_p)
    cache = {}

    def ise(h):
        if h not in cache:
            x = _pi_boundary(t_p, h, po_y, po_v)
            cache[h] = (math.inf, None) if x is None else (pi_indices(t_p, h, x, t_s).ISE, x)
        return cache[h][0]

    grid = np.linspace(0.0, 0.9 * h_p, n_grid)
    vals = [ise(float(h)) for h in grid]
    k = int(np.argmin(vals))
    if not math.isfinite(vals[k]):
        raise InfeasibleTuning(f"no feasible PI point at t_p = {t_p}")
    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, len(grid) - 1)]
    res = minimize_scalar(ise, bounds=(float(a), float(b)), method="bounded",
                          options={"xatol": h_tol})
    h = float(res.x) if res.fun <= vals[k] else float(grid[k])
    h_i = cache[h][1]
    ix = pi_indices(t_p, h, h_i, t_s)
    active = "PO_y" if po_y - ix.PO_y < (po_v - ix.PO_v) * po_y / po_v else "PO_v"
    return TunedPoint("pi", t_p, h, h_i, ix, active=active,
                      slack={"PO_y": po_y - ix.PO_y, "PO_v": po_v - ix.PO_v})


# ---------------------------------------------------------------- Table 1

@dataclass(frozen=True)
class Table1Row:
    t_p: float
    pi: TunedPoint
    sp: TunedPoint
    prop: TunedPoint
    published: tuple
    ise_at_published: dict

    def deviations(self) -> dict:
        _, pi_h, pi_hi, sp_h, sp_hi, pr_hi, pi_ise, sp_ise, pr_ise = self.published
        return {
            "pi_h": self.pi.h - pi_h,
            "pi_h_i": self.pi.h_i - pi_hi,
            "sp_h": self.sp.h - sp_h,
            "sp_hi_tp": self.sp.h_i * self.t_p - SP_CHART_POINT[1],
            "prop_h_i": self.prop.h_i - pr_hi,
            "pi_ise_published": self.ise_at_published["pi"] - pi_ise,
            "sp_ise_published": self.ise_at_published["sp"] - sp_ise,
            "prop_ise_published": self.ise_at_published["proposed"] - pr_ise,
        }

    def tolerances(self) -> dict:
        return {"pi_h": 0.02, "pi_h_i": 0.02, "sp_h": 0.002, "sp_hi_tp": 0.002,
                "prop_h_i": 0.02, "pi_ise_published": 0.005, "sp_ise_published": 0.001,
                "prop_ise_published": 0.001 if self.t_p >= 2.5 else 0.005}

    def failures(self) -> list[str]:
        tol = self.tolerances()
        return [k for k, d in self.deviations().items() if abs(d) > tol[k] + 1e-12]


def ise_at_published(row) -> dict:
    t_p, pi_h, pi_hi, _, _, pr_hi = row[:6]
    sp_h, sp_X = SP_CHART_POINT
    return {
        "pi": pi_indices(t_p, pi_h, pi_hi).ISE,
        "sp": sp_analytic.sp_ise(ControllerGains(sp_h, sp_X / t_p), t_p),
        "proposed": proposed.proposed_ise(proposed.ProposedScenario(t_p, pr_hi)),
    }


def table1_row(row) -> Table1Row:
    t_p = row[0]
    return Table1Row(t_p=t_p, pi=tune_pi(t_p), sp=tune_sp(t_p), prop=tune_proposed(t_p),
                     published=tuple(row), ise_at_published=ise_at_published(row))


def worker_count() -> int:
    env = os.environ.get("DELAYLOOP_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def reproduce_table1(workers: int | None = None) -> list[Table1Row]:
    workers = worker_count() if workers is None else workers
    if workers <= 1:
        return [table1_row(r) for r in TABLE1]
    with ProcessPoolExecutor(max_workers=min(workers, len(TABLE1))) as ex:
        return list(ex.map(table1_row, TABLE1))
