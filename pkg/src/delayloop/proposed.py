"""Setpoint step response of the two-mode variable-structure controller.

Mode one is open loop: after the 1 -> 0 step the plant output stays at 1
for one delay, then decays freely as ``exp((1 - t)/t_p)`` until it reaches
the band ``B_s`` at ``t = 1 + t_q``.  Mode two is a pure integrator, so the
remaining response solves the delay equation with ``h = 0``.  Its initial
function is the mode-one output over the delay preceding the switch, i.e.
the integrator's forcing reaches back one delay before the band entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import indices
from .core import ControllerGains
from .mos_solver import BasisSegment, PiecewiseResponse, control_output, solve

WINDOW = 7.0
N_POINTS = 701


@dataclass(frozen=True)
class ProposedScenario:
    t_p: float
    h_i: float
    B_s: float = 0.02
    t_s: float = 7.0

    def __post_init__(self):
        if not self.t_p > 0:
            raise ValueError("t_p must be > 0")
        if not self.h_i > 0:
            raise ValueError("h_i must be > 0")
        if not 0 < self.B_s < 1:
            raise ValueError("B_s must lie in (0, 1)")
        if not self.t_s > 1:
            raise ValueError("t_s must exceed the delay")

    @property
    def t_q(self) -> float:
        """Time the free decay needs to go from 1 down to ``B_s``."""
        return self.t_p * math.log(1.0 / self.B_s)

    @property
    def t_switch(self) -> float:
        return 1.0 + self.t_q


def first_mode(t_p: float, B_s: float = 0.02):
    """Return ``(y_fn, t_q)``; ``y_fn`` is the open-loop output on ``[0, 1 + t_q]``."""
    scn = ProposedScenario(t_p=t_p, h_i=1.0, B_s=B_s)
    t_q = scn.t_q

    def y_fn(t):
        t = np.asarray(t, dtype=float)
        out = np.where(t <= 1.0, 1.0, np.exp((1.0 - t) / t_p))
        return out if out.ndim else float(out)

    return y_fn, t_q


def mode_switch_history(scn: ProposedScenario) -> PiecewiseResponse:
    """Mode-one output over ``[t_q, 1 + t_q]``, re-based to ``[-1, 0]``."""
    t_q, t_p = scn.t_q, scn.t_p
    if t_q < 1.0:
        segs = (BasisSegment(-1.0, -t_q, [1.0], [0.0]),
                BasisSegment(-t_q, 0.0, [0.0], [1.0]))
    else:
        segs = (BasisSegment(-1.0, 0.0, [0.0], [math.exp((1.0 - t_q) / t_p)]),)
    return PiecewiseResponse(segs, t_p=t_p)


def second_mode_solve(scn: ProposedScenario, t_end: float = WINDOW + 1.0) -> PiecewiseResponse:
    """Second-mode response in local time (0 = mode switch) on ``[0, t_end]``."""
    return solve(mode_switch_history(scn), ControllerGains(0.0, scn.h_i),
                 scn.t_p, t_end)


def response(scn: ProposedScenario, second: PiecewiseResponse | None = None):
    """Whole-step output ``y(t)`` for ``t >= 0`` in the original time origin."""
    y1, _ = first_mode(scn.t_p, scn.B_s)
    ts = scn.t_switch

    def y_fn(t):
        nonlocal second
        t = np.asarray(t, dtype=float)
        out = np.asarray(y1(t), dtype=float).copy()
        late = t >= ts
        if np.any(late):
            need = float(np.max(t[late]) - ts)
            if second is None or second.end < need:
                second = second_mode_solve(scn, max(need, WINDOW + 1.0))
            out[late] = second(t[late] - ts)
        return out if out.ndim else float(out)

    return y_fn


def _window(scn: ProposedScenario, second: PiecewiseResponse | None = None):
    resp = second if second is not None else second_mode_solve(scn)
    return indices.sample(resp, WINDOW, N_POINTS,
                          lambda t: control_output(resp, scn.t_p, t))


def steadiness_index(scn: ProposedScenario, second: PiecewiseResponse | None = None) -> float:
    """``PO_b``: largest ``|y|`` over 701 samples of the 7-delay window after the switch."""
    return float(np.abs(_window(scn, second).y).max())


def proposed_overshoots(scn: ProposedScenario,
                        second: PiecewiseResponse | None = None) -> tuple[float, float]:
    po_y, po_v = indices.overshoots(_window(scn, second))
    return po_y, po_v


def first_mode_ise(t_p: float, t_q: float, t_s: float = 7.0) -> float:
    end = min(t_q, t_s - 1.0)
    return 1.0 + 0.5 * t_p * (1.0 - math.exp(-2.0 * end / t_p))


def proposed_ise(scn: ProposedScenario, second: PiecewiseResponse | None = None) -> float:
    """Closed-form first-mode contribution plus trapezoid ISE of the second mode up to ``t_s``."""
    t_q = scn.t_q
    base = first_mode_ise(scn.t_p, t_q, scn.t_s)
    span = scn.t_s - scn.t_switch
    if span <= 0:
        return base
    resp = second if second is not None else second_mode_solve(scn, max(span, WINDOW + 1.0))
    n = max(1, int(round(span / indices.CONFORMING_DT)))
    t = np.linspace(0.0, span, n + 1)
    y2 = resp(t) ** 2
    ise_b = (span / n) * (y2.sum() - 0.5 * (y2[0] + y2[-1]))
    return base + float(ise_b)
