"""Minimum-ISE PI tuning under two overshoot limits.

For each h the admissible integral gains end at the first crossing of
either overshoot limit; ISE falls with h_i up to there, so the search runs
along that boundary.  At small t_p the output overshoot binds, at larger
t_p the controller-output overshoot does.
"""

import numpy as np

from delayloop import pi_indices, trace_curve, tune_pi

for t_p in (0.1, 0.55, 1.0):
    p = tune_pi(t_p)
    ix = p.indices
    print(f"t_p = {t_p:4}: h = {p.h:.3f}, h_i = {p.h_i:.3f}, PO_y = {ix.PO_y:.4f}, "
          f"PO_v = {ix.PO_v:.4f}, ISE = {ix.ISE:.4f}, binding {p.active}")

# The ISE valley along the binding curve is shallow, which makes the
# optimal h sensitive to small changes in the indices.
curve = trace_curve("overshoot_v", "pi", np.linspace(1.0, 1.4, 5), 0.10, t_p=1.0)
for h, h_i in curve.points:
    ix = pi_indices(1.0, h, h_i)
    print(f"t_p = 1 on PO_v = 0.1: h = {h:.2f}, h_i = {h_i:.4f}, PO_y = {ix.PO_y:.4f}, ISE = {ix.ISE:.5f}")
