"""Exact method-of-steps solution of the closed-loop delay equation

    t_p y''(t) + y'(t) = h_i (r(t-1) - y(t-1)) - h y'(t-1)

with delay normalized to 1.  The setpoint is piecewise constant, so its
derivative never enters the forcing; the solution is C^1 across every joint.

On each segment the solution has the form

    y(t) = sum_i A_i tau^i + exp(-tau/t_p) sum_j B_j tau^j,   tau = t - start,

and the forcing on a segment is built from the segment exactly one delay
earlier, which shares the same local time origin.  Because exp(-tau/t_p)
solves the homogeneous equation, exponential forcing raises the degree of
the exponential polynomial by one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import ControllerGains
from .errors import ConditioningError

#: Largest admitted coefficient magnitude before the solver refuses.
MAX_COEFFICIENT = 1e12
#: Smallest admitted normalized time constant.
MIN_TP = 1e-3
#: Longest admitted horizon, in delays.
MAX_T_END = 12.0

_JOINT_TOL = 1e-12


def _poly(c) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=float))
    nz = np.flatnonzero(c)
    return c[: nz[-1] + 1].copy() if nz.size else np.zeros(1)


# numpy.polynomial's generic helpers cost more than the arithmetic at these
# degrees; ascending-coefficient arrays are handled directly.
def _der(c: np.ndarray) -> np.ndarray:
    if c.size <= 1:
        return np.zeros(1)
    return c[1:] * np.arange(1, c.size)


def _int(c: np.ndarray) -> np.ndarray:
    return np.concatenate(([0.0], c / np.arange(1, c.size + 1)))


def _add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.size < b.size:
        a, b = b, a
    out = a.copy()
    out[: b.size] += b
    return out


def _horner(c: np.ndarray, x):
    out = np.full_like(x, c[-1]) if isinstance(x, np.ndarray) else c[-1]
    for k in range(c.size - 2, -1, -1):
        out = out * x + c[k]
    return out


@dataclass(frozen=True, eq=False)
class BasisSegment:
    """``poly`` and ``expo`` hold ascending coefficients in local time."""

    start: float
    end: float
    poly: np.ndarray
    expo: np.ndarray

    def __post_init__(self):
        if not self.end > self.start:
            raise ValueError("segment end must exceed its start")
        poly, expo = _poly(self.poly), _poly(self.expo)
        if not (np.all(np.isfinite(poly)) and np.all(np.isfinite(expo))):
            raise ValueError("segment coefficients must be finite")
        object.__setattr__(self, "poly", poly)
        object.__setattr__(self, "expo", expo)
        dp, dq = _der(poly), _der(expo)
        object.__setattr__(self, "_d", (dp, dq, _der(dp), _der(dq)))

    @property
    def degrees(self) -> tuple[int, int]:
        """Degrees of the polynomial and exponential-polynomial parts (-1 for zero)."""
        def deg(c):
            nz = np.flatnonzero(c)
            return int(nz[-1]) if nz.size else -1
        return deg(self.poly), deg(self.expo)

    def value(self, tau, t_p: float, order: int = 0):
        """Value (``order=0``) or derivative of order 1 or 2 at local time ``tau``."""
        if not isinstance(tau, float):
            tau = np.asarray(tau, dtype=float)
        e = np.exp(-tau / t_p)
        q = _horner(self.expo, tau)
        if order == 0:
            return _horner(self.poly, tau) + e * q
        dp, dq, d2p, d2q = self._d
        dqv = _horner(dq, tau)
        if order == 1:
            return _horner(dp, tau) + e * (dqv - q / t_p)
        if order == 2:
            return _horner(d2p, tau) + e * (_horner(d2q, tau) - 2.0 * dqv / t_p + q / t_p**2)
        raise ValueError("order must be 0, 1 or 2")


@dataclass(frozen=True, eq=False)
class PiecewiseResponse:
    """Contiguous basis segments covering ``[start, end]``."""

    segments: tuple[BasisSegment, ...]
    t_p: float
    gains: ControllerGains | None = None
    setpoint: float = 0.0
    history: "PiecewiseResponse | None" = field(default=None, repr=False)

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise ValueError("a response needs at least one segment")
        for a, b in zip(segs, segs[1:]):
            if abs(b.start - a.end) > 1e-12:
                raise ValueError("segments must be contiguous")
        if not self.t_p > 0:
            raise ValueError("basis form needs t_p > 0")
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "_starts", np.array([s.start for s in segs]))

    @property
    def start(self) -> float:
        return self.segments[0].start

    @property
    def end(self) -> float:
        return self.segments[-1].end

    def _evaluate(self, t, order: int):
        t = np.asarray(t, dtype=float)
        if np.any(t < self.start - _JOINT_TOL) or np.any(t > self.end + _JOINT_TOL):
            raise ValueError(
                f"time outside response coverage [{self.start}, {self.end}]")
        idx = np.searchsorted(self._starts, t, side="right") - 1
        idx = np.clip(idx, 0, len(self.segments) - 1)
        out = np.empty(t.shape)
        for k in np.unique(idx):
            mask = idx == k
            seg = self.segments[k]
            out[mask] = seg.value(t[mask] - seg.start, self.t_p, order)
        return out if out.ndim else float(out)

    def __call__(self, t):
        return self._evaluate(t, 0)

    def derivative(self, t, order: int = 1):
        return self._evaluate(t, order)


def evaluate(resp: PiecewiseResponse, t):
    """Exact value of ``resp`` at ``t``; at a joint the right segment wins."""
    return resp(t)


def control_output(resp: PiecewiseResponse, t_p: float, t):
    """Normalized controller output ``v(t) = y(t+1) + t_p y'(t+1)``."""
    t = np.asarray(t, dtype=float)
    return resp(t + 1.0) + t_p * resp.derivative(t + 1.0)


def constant_history(value: float, t_p: float) -> PiecewiseResponse:
    return PiecewiseResponse(
        (BasisSegment(-1.0, 0.0, [value], [0.0]),), t_p=t_p)


def _particular(pf: np.ndarray, qf: np.ndarray, t_p: float):
    # Polynomial part: P' = sum_k (-t_p)^k pf^(k) solves t_p P'' + P' = pf.
    s = np.zeros(pf.size)
    d, scale = pf, 1.0
    while np.any(d):
        s[: d.size] += scale * d
        d = _der(d)
        scale *= -t_p
    # Exponential part: Q' = -sum_k t_p^k qf^(k) solves t_p Q'' - Q' = qf.
    w = np.zeros(qf.size)
    d, scale = qf, 1.0
    while np.any(d):
        w[: d.size] -= scale * d
        d = _der(d)
        scale *= t_p
    return _int(s), _int(w)


def solve(history: PiecewiseResponse, g: ControllerGains, t_p: float,
          t_end: float, setpoint: float = 0.0,
          setpoint_before: float | None = None) -> PiecewiseResponse:
    """Propagate ``history`` (given on ``[-1, 0]``) forward to ``t_end``.

    ``setpoint_before`` is the setpoint in force over the history window; it
    defaults to ``setpoint``.  A 1 -> 0 setpoint step at ``t = 0`` applied to
    a loop at rest at 1 is ``constant_history(1)`` with ``setpoint_before=1``.
    """
    if not t_p > 0:
        raise ValueError("t_p must be > 0 for the exponential basis")
    if t_p < MIN_TP:
        raise ValueError(
            f"t_p={t_p} < {MIN_TP}: the exponential basis underflows; "
            "use delayloop.oracle.integrate instead")
    if not 0 < t_end <= MAX_T_END:
        raise ValueError(f"t_end must lie in (0, {MAX_T_END}]")
    if not isinstance(history, PiecewiseResponse):
        raise TypeError("history must be a PiecewiseResponse in basis form")
    if abs(history.start + 1.0) > 1e-12 or abs(history.end) > 1e-12:
        raise ValueError("history must cover exactly [-1, 0]")
    if abs(history.t_p - t_p) > 1e-15 * max(1.0, t_p):
        raise ValueError("history basis uses a different t_p")
    if setpoint_before is None:
        setpoint_before = setpoint

    h, h_i = g.h, g.h_i
    segs = list(history.segments)
    last = segs[-1]
    span = last.end - last.start
    y0 = float(last.value(float(span), t_p))
    dy0 = float(last.value(float(span), t_p, 1))

    out: list[BasisSegment] = []
    i = 0
    while True:
        src = segs[i]
        start, end = src.start + 1.0, src.end + 1.0
        if start >= t_end - _JOINT_TOL:
            break
        r_delayed = setpoint_before if src.start < 0 else setpoint
        pf = _add(-h_i * src.poly, -h * _der(src.poly))
        pf[0] += h_i * r_delayed
        qf = _add(-h_i * src.expo + (h / t_p) * src.expo, -h * _der(src.expo))
        P, Q = _particular(_poly(pf), _poly(qf), t_p)
        dP0 = P[1] if P.size > 1 else 0.0
        dQ0 = Q[1] if Q.size > 1 else 0.0
        c2 = t_p * (dP0 + dQ0 - dy0)
        P = P.copy()
        Q = Q.copy()
        P[0] += y0 - c2
        Q[0] += c2
        if max(np.max(np.abs(P)), np.max(np.abs(Q))) > MAX_COEFFICIENT:
            raise ConditioningError(
                f"basis coefficients exceed {MAX_COEFFICIENT:g} on segment "
                f"[{start:.4g}, {end:.4g}]")
        seg = BasisSegment(start, end, P, Q)
        segs.append(seg)
        out.append(seg)
        ell = end - start
        y0 = float(seg.value(float(ell), t_p))
        dy0 = float(seg.value(float(ell), t_p, 1))
        i += 1

    if out and out[-1].end > t_end:
        tail = out[-1]
        out[-1] = BasisSegment(tail.start, t_end, tail.poly, tail.expo)
    return PiecewiseResponse(tuple(out), t_p=t_p, gains=g, setpoint=setpoint,
                             history=history)
