"""Brute-force fixed-step integrators used as ground truth.

Nothing in the production paths calls into this module; it exists so that
the exact solutions can be checked against an independent route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import ControllerGains
from .errors import DivergenceError


@dataclass(frozen=True)
class DdeProblem:
    """``t_p y'' + y' = h_i (r(t-1) - y(t-1)) - h y'(t-1)`` for ``t >= 0``.

    ``history`` gives ``y`` on ``[-1, 0]``; ``history_dot`` its derivative
    (central differences of ``history`` when omitted).  The setpoint is
    ``setpoint_before`` while ``t - 1 < 0`` and ``setpoint`` afterwards.
    ``t_p = 0`` reduces the equation to first order, ``y' = forcing``.
    """

    t_p: float
    gains: ControllerGains
    history: Callable[[np.ndarray], np.ndarray]
    t_end: float
    dt: float = 1e-4
    history_dot: Callable[[np.ndarray], np.ndarray] | None = None
    setpoint: float = 0.0
    setpoint_before: float | None = None
    divergence_bound: float = 1e8

    def __post_init__(self):
        if self.t_end < 0:
            raise ValueError("horizon must be >= 0")
        n = 1.0 / self.dt
        if abs(n - round(n)) > 1e-6 * n:
            raise ValueError("dt must divide the unit delay")
        if self.t_p < 0:
            raise ValueError("t_p must be >= 0")


@dataclass(frozen=True)
class DenseTrace:
    t: np.ndarray
    y: np.ndarray
    dy: np.ndarray

    def __call__(self, tq):
        """Cubic Hermite interpolation of the stored trajectory."""
        tq = np.asarray(tq, dtype=float)
        dt = self.t[1] - self.t[0]
        k = np.clip(np.floor((tq - self.t[0]) / dt).astype(int), 0, len(self.t) - 2)
        s = (tq - self.t[k]) / dt
        y0, y1 = self.y[k], self.y[k + 1]
        m0, m1 = self.dy[k] * dt, self.dy[k + 1] * dt
        h00 = 2 * s**3 - 3 * s**2 + 1
        h10 = s**3 - 2 * s**2 + s
        h01 = -2 * s**3 + 3 * s**2
        h11 = s**3 - s**2
        return h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1


def _history_dot(p: DdeProblem, t: np.ndarray) -> np.ndarray:
    if p.history_dot is not None:
        return np.asarray(p.history_dot(t), dtype=float) * np.ones_like(t)
    eps = 1e-6
    return (np.asarray(p.history(t + eps)) - np.asarray(p.history(t - eps))) / (2 * eps)


def integrate(p: DdeProblem) -> DenseTrace:
    """Classic RK4 on ``(y, y')`` with the delay an integer number of steps.

    Delayed reads at half steps use the Hermite midpoint formulas on the
    stored ``(y, y')`` pairs, so joints at integer times are mesh points.
    """
    dt = p.dt
    N = int(round(1.0 / dt))
    steps = int(math.ceil(p.t_end / dt - 1e-9))
    h, h_i, t_p = p.gains.h, p.gains.h_i, p.t_p
    r_new = p.setpoint
    r_old = p.setpoint if p.setpoint_before is None else p.setpoint_before

    # Stored trajectory: index j <-> time (j - N) * dt, history included.
    th = np.linspace(-1.0, 0.0, N + 1)
    yh = np.asarray(p.history(th), dtype=float) * np.ones(N + 1)
    dyh = _history_dot(p, th)
    thm = th[:-1] + dt / 2
    yhm = np.asarray(p.history(thm), dtype=float) * np.ones(N)
    dyhm = _history_dot(p, thm)

    total = N + 1 + steps
    Y = np.empty(total)
    D = np.empty(total)
    Y[: N + 1] = yh
    D[: N + 1] = dyh
    Y_list = Y.tolist()
    D_list = D.tolist()
    yhm_l = yhm.tolist()
    dyhm_l = dyhm.tolist()

    y = Y_list[N]
    z = D_list[N]
    # A first-order plant has no y' state: y' is the forcing itself.
    first_order = t_p == 0
    bound = p.divergence_bound

    def forcing(r, yd, zd):
        return h_i * (r - yd) - h * zd

    for k in range(steps):
        # delayed sample indices for t_k - 1 and t_k + dt - 1
        j0 = k
        j1 = k + 1
        r0 = r_old if k < N else r_new
        y0d, z0d = Y_list[j0], D_list[j0]
        y1d, z1d = Y_list[j1], D_list[j1]
        if k < N:
            ymd, zmd = yhm_l[k], dyhm_l[k]
        else:
            ymd = 0.5 * (y0d + y1d) + dt * (z0d - z1d) / 8.0
            zmd = 1.5 * (y1d - y0d) / dt - 0.25 * (z0d + z1d)
        f0 = forcing(r0, y0d, z0d)
        fm = forcing(r0, ymd, zmd)
        f1 = forcing(r0, y1d, z1d)
        if first_order:
            y = y + dt * (f0 + 4.0 * fm + f1) / 6.0
            z = f1
        else:
            k1y = z
            k1z = (f0 - z) / t_p
            z2 = z + 0.5 * dt * k1z
            k2y = z2
            k2z = (fm - z2) / t_p
            z3 = z + 0.5 * dt * k2z
            k3y = z3
            k3z = (fm - z3) / t_p
            z4 = z + dt * k3z
            k4y = z4
            k4z = (f1 - z4) / t_p
            y = y + dt * (k1y + 2 * k2y + 2 * k3y + k4y) / 6.0
            z = z + dt * (k1z + 2 * k2z + 2 * k3z + k4z) / 6.0
        if not (abs(y) < bound and abs(z) < bound):
            raise DivergenceError(
                f"state left |.| < {bound:g} at t = {(k + 1) * dt:.4g}")
        Y_list[N + 1 + k] = y
        D_list[N + 1 + k] = z

    t = (np.arange(total) - N) * dt
    return DenseTrace(t=t[N:], y=np.array(Y_list[N:]), dy=np.array(D_list[N:]))


def integrate_ode(f: Callable[[float, np.ndarray], np.ndarray], y0, t_end: float,
                  dt: float = 1e-4) -> tuple[np.ndarray, np.ndarray]:
    """Classic RK4 for ``x' = f(t, x)`` on ``[0, t_end]``.

    ``f`` must be right-continuous in ``t`` with any jumps on mesh points;
    the last stage of each step is evaluated at the left limit of the step's
    end so a jump never leaks into the step before it.
    """
    steps = int(math.ceil(t_end / dt - 1e-9))
    x = np.array(y0, dtype=float)
    out = np.empty((steps + 1, x.size))
    out[0] = x
    for k in range(steps):
        t = k * dt
        tm = t + dt / 2
        t1 = (k + 1) * dt
        a = f(t, x)
        b = f(tm, x + 0.5 * dt * a)
        c = f(tm, x + 0.5 * dt * b)
        d = f(np.nextafter(t1, -np.inf), x + dt * c)
        x = x + dt * (a + 2 * b + 2 * c + d) / 6.0
        if not np.all(np.isfinite(x)):
            raise DivergenceError(f"non-finite state at t = {t1:.4g}")
        out[k + 1] = x
    return np.arange(steps + 1) * dt, out
