"""Where a PI loop around a delayed first-order plant is stable.

Time is measured in delays, so the plant is exp(-s) / (1 + s t_p) and the
controller is h + h_i / s.
"""

import numpy as np

from delayloop import ControllerGains, hi_stability_bounds, phase_margin, proportional_limit, ultimate_gain

t_p = 1.0

# The gain at which the root equation peaks, and the gain at which the
# stable range of h_i closes.  The second one is the one that matters.
z_a, h_u = ultimate_gain(t_p)
z_p, h_p = proportional_limit(t_p)
print(f"t_p = {t_p}: peak of the root equation h_u = {h_u:.4f}, "
      f"largest stabilizable h = {h_p:.4f}")

# Upper limit of h_i across the admissible h range.
print("\n    h     h_i_max")
for h in np.linspace(0.0, 0.98 * h_p, 8):
    print(f"{h:6.3f}  {hi_stability_bounds(h, t_p).h_i_max:8.4f}")

# Phase margin of a tuned loop.
pm = phase_margin(ControllerGains(1.15, 0.744), t_p)
print(f"\nh = 1.15, h_i = 0.744: crossover z_b = {pm.z_b:.4f}, PM = {pm.PM_deg:.2f} deg")

# Without a lag the plant is a pure delay: h_i_max = pi / 2 at h = 0.
print(f"pure delay, h = 0: h_i_max = {hi_stability_bounds(0.0, 0.0).h_i_max:.10f}")
