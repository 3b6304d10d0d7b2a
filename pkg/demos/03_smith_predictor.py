"""Tuning a Smith predictor with a matched model.

With the delay taken out of the loop the response is a delayed damped
oscillation, and both overshoots have closed forms.  On the chart
(h, h_i t_p) the overshoot curves do not depend on t_p, so one point serves
every plant.
"""

import numpy as np

from delayloop import ControllerGains, sp_ise, sp_overshoots, tune_sp
from delayloop.tuning import trace_curve

hs = np.linspace(0.25, 2.5, 10)
gy = trace_curve("overshoot_y", "sp", hs, 0.0105)
gv = trace_curve("overshoot_v", "sp", hs, 0.10)
print("    h    X on PO_y = 0.0105   X on PO_v = 0.10")
for (h, xy), (_, xv) in zip(gy.points, gv.points):
    print(f"{h:6.3f}  {xy:12.5f}  {xv:16.5f}")

p = tune_sp(1.0)
print(f"\nintersection: h = {p.h:.5f}, h_i t_p = {p.h_i:.5f}")
for t_p in (0.1, 1.0, 10.0):
    g = ControllerGains(p.h, p.h_i / t_p)
    print(f"t_p = {t_p:5}: overshoots {sp_overshoots(g, t_p)}, ISE {sp_ise(g, t_p):.4f}")
