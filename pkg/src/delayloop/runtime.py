"""Sampled-data implementation of the two-mode variable-structure controller.

Mode ONE answers a setpoint change with the open-loop output ``r / K_hat``;
the integrator of mode TWO tracks that output so the hand-over is bumpless.
Mode TWO starts once the error enters the ``+-band`` and then integrates
``K_i (r - y)``.  A steady-state watch updates ``K_hat`` from ``y / u``.

By default the band test in mode ONE is made on the output predicted one
delay ahead from the memorized plant model (``switch_on="predicted"``),
which starts the integration one delay before the measured error enters the
band.  ``switch_on="measured"`` tests the measured error instead.
"""

from __future__ import annotations

import enum
import logging
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)


class Mode(enum.Enum):
    ONE = 1
    TWO = 2


@dataclass(frozen=True)
class RuntimeConfig:
    """``k_i`` in controller-output units per error-second; times in seconds."""

    k_i: float
    band: float = 0.02
    time_constant: float | None = None
    delay: float | None = None
    switch_on: str = "predicted"
    steady_window: float | None = None
    steady_tolerance: float = 0.01
    u_min: float = 1e-6
    u_max: float = math.inf

    def __post_init__(self):
        if self.switch_on not in ("predicted", "measured"):
            raise ValueError("switch_on must be 'predicted' or 'measured'")
        if self.switch_on == "predicted" and (self.time_constant is None or self.delay is None):
            raise ValueError("predicted switching needs the plant time constant and delay")
        if not self.band > 0:
            raise ValueError("band must be > 0")

    def window(self) -> float:
        if self.steady_window is not None:
            return self.steady_window
        if self.time_constant:
            return 5.0 * self.time_constant
        return 5.0 * (self.delay or 1.0)


@dataclass
class ControllerState:
    mode: Mode
    k_hat: float
    accumulator: float
    r_ref: float
    steady_timer: float = 0.0
    ticks: int = 0
    u: float = 0.0
    model: float = 0.0
    model_past: deque = field(default_factory=deque)
    samples: deque = field(default_factory=deque)
    saturation_events: int = 0


def adapt_gain(k_hat: float, r_history, y_history, u_history, band: float,
               tolerance: float = 0.01, u_min: float = 1e-6) -> float:
    """Return ``y / u`` if the window is steady, else ``k_hat`` unchanged.

    Steady means the setpoint stayed within ``band`` of its last value and
    ``y`` and ``u`` stayed within ``tolerance`` (relative) of theirs.
    """
    r = np.asarray(r_history, dtype=float)
    y = np.asarray(y_history, dtype=float)
    u = np.asarray(u_history, dtype=float)
    if r.size == 0:
        return k_hat
    if np.max(np.abs(r - r[-1])) > band:
        return k_hat
    for s in (y, u):
        ref = abs(s[-1])
        if ref == 0 or np.max(np.abs(s - s[-1])) > tolerance * ref:
            return k_hat
    if abs(u[-1]) < u_min:
        return k_hat
    return float(y[-1] / u[-1])


class VariableStructureController:
    """One controller instance; not safe to step from several threads."""

    def __init__(self, config: RuntimeConfig, k_hat: float, r0: float = 0.0,
                 u0: float | None = None):
        if k_hat == 0 or not math.isfinite(k_hat):
            raise ValueError("k_hat must be finite and nonzero")
        self.config = config
        u0 = r0 / k_hat if u0 is None else u0
        self.state = ControllerState(mode=Mode.TWO, k_hat=k_hat, accumulator=u0,
                                     r_ref=r0, u=u0, model=k_hat * u0)

    def _predicted(self, y: float, dt: float) -> float:
        """Output one delay ahead: ``y + m(t) - m(t - L)`` for the undelayed model ``m``."""
        st, cfg = self.state, self.config
        n = max(1, int(round(cfg.delay / dt)))
        past = st.model_past
        if not past:
            past.extend([st.model] * n)
        return y + st.model - past[0]

    def _advance_model(self, u: float, dt: float):
        st, cfg = self.state, self.config
        if cfg.switch_on != "predicted":
            return
        a = math.exp(-dt / cfg.time_constant) if cfg.time_constant > 0 else 0.0
        st.model_past.append(st.model)
        st.model_past.popleft()
        st.model = a * st.model + (1 - a) * st.k_hat * u

    def step(self, r: float, y: float, dt: float) -> float:
        """Advance one sample and return the controller output."""
        if not (math.isfinite(r) and math.isfinite(y)):
            raise ValueError("non-finite sample")
        if not dt > 0:
            raise ValueError("dt must be > 0")
        st, cfg = self.state, self.config

        if abs(r - st.r_ref) > cfg.band:
            st.mode = Mode.ONE
            st.r_ref = r
        if st.mode is Mode.ONE:
            st.u = r / st.k_hat
            st.accumulator = st.u
            if cfg.switch_on == "predicted":
                err = r - self._predicted(y, dt)
            else:
                err = r - y
            if abs(err) <= cfg.band:
                st.mode = Mode.TWO
        else:
            st.accumulator += cfg.k_i * (r - y) * dt
            st.u = st.accumulator

        u = st.u
        if abs(u) > cfg.u_max:
            st.saturation_events += 1
            log.warning("controller output %.6g beyond +-%.6g", u, cfg.u_max)
            u = math.copysign(cfg.u_max, u)
        if cfg.switch_on == "predicted":
            if not st.model_past:
                self._predicted(y, dt)
            self._advance_model(u, dt)
        self._watch_steady(r, y, u, dt)
        return u

    def _watch_steady(self, r: float, y: float, u: float, dt: float):
        st, cfg = self.state, self.config
        n = max(2, int(round(cfg.window() / dt)))
        buf = st.samples
        if buf.maxlen != n:
            buf = st.samples = deque(buf, maxlen=n)
        buf.append((r, y, u))
        st.steady_timer = min(st.steady_timer + dt, cfg.window())
        st.ticks += 1
        if len(buf) < n:
            return
        # Checking every sample would cost O(window) per step.
        if st.ticks % max(1, n // 10):
            return
        arr = np.asarray(buf)
        new = adapt_gain(st.k_hat, arr[:, 0], arr[:, 1], arr[:, 2], cfg.band,
                         cfg.steady_tolerance, cfg.u_min)
        if new != st.k_hat and new != 0 and math.isfinite(new):
            log.info("process gain updated %.6g -> %.6g", st.k_hat, new)
            st.k_hat = new
            st.steady_timer = 0.0


class FopdtPlant:
    """Zero-order-hold exact discretization of ``K e^{-sL} / (1 + s T_p)``."""

    def __init__(self, K: float, T_p: float, L: float, dt: float, y0: float = 0.0,
                 u0: float | None = None):
        self.K, self.T_p, self.dt = K, T_p, dt
        n = int(round(L / dt))
        if abs(n * dt - L) > 1e-9 * max(1.0, L):
            raise ValueError("dt must divide the delay")
        u0 = y0 / K if u0 is None else u0
        self._queue = deque([u0] * n)
        self._a = math.exp(-dt / T_p) if T_p > 0 else 0.0
        self.y = y0

    def step(self, u: float) -> float:
        """Apply ``u`` for one sample and return the output at the end of it."""
        self._queue.append(u)
        u_del = self._queue.popleft()
        self.y = self._a * self.y + (1 - self._a) * self.K * u_del
        return self.y


def simulate(controller: VariableStructureController, plant: FopdtPlant, setpoint,
             t_end: float) -> dict[str, np.ndarray]:
    """Closed loop sampled every ``plant.dt``; ``setpoint`` maps time to ``r``.

    Returns arrays ``t``, ``r``, ``y``, ``u`` and ``mode``; ``y[k]`` is the
    measurement the controller saw at ``t[k]``.
    """
    dt = plant.dt
    n = int(round(t_end / dt))
    out = {k: np.empty(n + 1) for k in ("t", "r", "y", "u", "mode")}
    y = plant.y
    for k in range(n + 1):
        t = k * dt
        r = float(setpoint(t))
        u = controller.step(r, y, dt)
        out["t"][k], out["r"][k], out["y"][k], out["u"][k] = t, r, y, u
        out["mode"][k] = controller.state.mode.value
        y = plant.step(u)
    return out
