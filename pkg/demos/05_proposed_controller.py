"""The two-mode controller: open loop first, integral action near the target.

After a setpoint change the controller outputs r / K at once and lets the
plant settle open loop.  Once the output is within the band +-B_s the
integrator takes over, starting from the current output.
"""

from delayloop import ProposedScenario, proposed_indices, response, tune_proposed
from delayloop.tuning import pi_indices, sp_indices

t_p = 2.5
p = tune_proposed(t_p)
scn = ProposedScenario(t_p, p.h_i)
print(f"t_p = {t_p}: h_i = {p.h_i:.4f}, switch after t_q = {scn.t_q:.3f}, "
      f"integrator acts from t = {scn.t_switch:.3f}")
print(f"PO_y = {p.indices.PO_y:.4f}, PO_v = {p.indices.PO_v:.4f}, "
      f"band peak = {p.indices.PO_b:.4f}")

y = response(scn)
for t in sorted((0.0, 1.0, 3.0, 7.0, 10.0, scn.t_switch, 14.0)):
    print(f"y({t:6.3f}) = {y(t):+.6f}")

print("\nISE at the same plant:")
print(f"  proposed {proposed_indices(t_p, p.h_i).ISE:.4f}")
print(f"  PI       {pi_indices(t_p, 2.10, 0.682).ISE:.4f}")
print(f"  SP       {sp_indices(t_p, 1.239, 1.849 / t_p).ISE:.4f}")
