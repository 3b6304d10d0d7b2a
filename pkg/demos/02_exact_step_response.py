"""Exact step response by the method of steps, checked against brute force.

The loop rests at y = 1 and the setpoint drops to 0 at t = 0.  Each unit
interval is a polynomial plus an exponential polynomial, built from the
interval before.
"""

import numpy as np

from delayloop import ControllerGains, constant_history, control_output, solve
from delayloop import oracle

t_p, g = 1.0, ControllerGains(1.15, 0.744)
resp = solve(constant_history(1.0, t_p), g, t_p, 8.0, setpoint=0.0, setpoint_before=1.0)

for seg in resp.segments[:4]:
    print(f"[{seg.start:.0f}, {seg.end:.0f}]  degrees (poly, exp) = {seg.degrees}")

t = np.linspace(0, 7, 8)
print("\n t     y(t)          v(t)")
for ti, yi, vi in zip(t, resp(t), control_output(resp, t_p, t)):
    print(f"{ti:3.0f}  {yi:+.9f}  {vi:+.9f}")

# Independent check: fixed-step RK4 on the delay equation.
trace = oracle.integrate(oracle.DdeProblem(t_p, g, np.ones_like, 7.0, dt=1e-4,
                                           history_dot=np.zeros_like, setpoint_before=1.0))
tt = np.linspace(0, 7, 701)
print(f"\nmax |exact - RK4| on [0, 7]: {np.max(np.abs(resp(tt) - trace(tt))):.2e}")
