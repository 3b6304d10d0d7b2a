"""Running the two-mode controller sample by sample against a plant.

The switch test uses the output predicted one delay ahead, so the
integrator starts when the predicted output enters the band.  Testing the
measured output instead starts it a delay later.  A wrong gain estimate is
corrected from the steady ratio y / u.
"""

import numpy as np

from delayloop import FopdtPlant, ProposedScenario, RuntimeConfig, VariableStructureController, response, simulate

analytic = response(ProposedScenario(1.0, 0.272))
for rule in ("predicted", "measured"):
    cfg = RuntimeConfig(k_i=0.272, band=0.02, time_constant=1.0, delay=1.0, switch_on=rule)
    ctl = VariableStructureController(cfg, k_hat=1.0, r0=1.0)
    out = simulate(ctl, FopdtPlant(1.0, 1.0, 1.0, 1e-3, y0=1.0), lambda t: 0.0, 7.0)
    t_sw = out["t"][np.argmax(out["mode"] == 2)]
    err = np.max(np.abs(out["y"] - analytic(out["t"])))
    print(f"{rule:9s}: switch at t = {t_sw:.3f}, max deviation from the exact trace {err:.2e}")

# The plant gain is 2 but the controller believes 1.
cfg = RuntimeConfig(k_i=0.272, time_constant=1.0, delay=1.0)
ctl = VariableStructureController(cfg, k_hat=1.0, r0=0.0)
plant = FopdtPlant(2.0, 1.0, 1.0, 1e-2)
out = simulate(ctl, plant, lambda t: 1.0, 60.0)
print(f"\nafter one step to r = 1: y = {out['y'][-1]:.5f}, learned K = {ctl.state.k_hat:.5f}")
print(f"next step to r = 0.5 outputs u = {ctl.step(0.5, plant.y, 1e-2):.5f}")
