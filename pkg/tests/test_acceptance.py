"""The seven acceptance criteria at their stated tolerances.

Each test records one PASS/FAIL line, printed in the terminal summary.
"""

import math

import numpy as np
import pytest

from conftest import ACCEPTANCE
from delayloop import oracle, proposed, runtime, stability
from delayloop.core import ControllerGains
from delayloop.indices import ise_trapezoid, overshoots, sample
from delayloop.mos_solver import constant_history, solve
from delayloop.sp_analytic import sp_damping, sp_ise, sp_overshoots, sp_response
from delayloop.tuning import SP_CHART_POINT, TABLE1


def report(k: int, failures: list[str], ok_detail: str = ""):
    ACCEPTANCE[k] = (not failures, "; ".join(failures[:6]) + (" ..." if len(failures) > 6 else "")
                     if failures else ok_detail)
    print(f"criterion {k}: {'PASS' if not failures else 'FAIL'}")
    assert not failures, "\n".join(failures)


def test_criterion_1_ise_at_published_parameters(table1_rows):
    bad = []
    worst = {"sp": 0.0, "proposed": 0.0, "pi": 0.0}
    for r in table1_rows:
        _, _, _, _, _, _, pi_ise, sp_printed, pr_ise = r.published
        tol = {"sp": 1e-3, "proposed": 1e-3 if r.t_p >= 2.5 else 5e-3, "pi": 5e-3}
        for key, printed in (("sp", sp_printed), ("proposed", pr_ise), ("pi", pi_ise)):
            d = abs(r.ise_at_published[key] - printed)
            worst[key] = max(worst[key], d)
            if d > tol[key]:
                bad.append(f"{key} ISE t_p={r.t_p}: {r.ise_at_published[key]:.5f} vs {printed}")
    report(1, bad, "max |dISE| " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def test_criterion_2_tuning_reproduction(table1_rows):
    bad = []
    for r in table1_rows:
        _, pi_h, pi_hi, _, _, pr_hi = r.published[:6]
        if abs(r.sp.h - 1.239) > 0.002 or abs(r.sp.h_i * r.t_p - 1.849) > 0.002:
            bad.append(f"sp t_p={r.t_p}: h={r.sp.h:.4f} X={r.sp.h_i * r.t_p:.4f}")
        for name, pt, ph, phi in (("pi", r.pi, pi_h, pi_hi), ("proposed", r.prop, 0.0, pr_hi)):
            if abs(pt.h - ph) > 0.02 or abs(pt.h_i - phi) > 0.02:
                bad.append(f"{name} t_p={r.t_p}: ({pt.h:.3f}, {pt.h_i:.3f}) vs ({ph}, {phi})")
            if abs(pt.indices.PO_y - 0.0105) > 0.0005:
                bad.append(f"{name} t_p={r.t_p}: PO_y={pt.indices.PO_y:.5f}")
    report(2, bad, "all 13 rows for sp, pi and proposed")


def test_criterion_3_sp_closed_form_vs_sampled():
    bad = []
    worst_po, worst_ise = 0.0, 0.0
    for row in TABLE1:
        t_p = row[0]
        g = ControllerGains(SP_CHART_POINT[0], SP_CHART_POINT[1] / t_p)
        po_y, po_v = sp_overshoots(g, t_p)
        # The first extrema of slow loops lie beyond t = 7; sample one full period.
        horizon = max(7.0, 1.0 + 2.0 * math.pi / sp_damping(g, t_p).b)
        tr = sample(lambda t: sp_response(g, t_p, t)[0], horizon, 701,
                    lambda t: sp_response(g, t_p, t)[1])
        s_y, s_v = overshoots(tr)
        worst_po = max(worst_po, abs(s_y - po_y), abs(s_v - po_v))
        if abs(s_y - po_y) > 2e-4 or abs(s_v - po_v) > 2e-4:
            bad.append(f"t_p={t_p}: PO ({po_y:.5f}, {po_v:.5f}) vs sampled ({s_y:.5f}, {s_v:.5f})")
        tr7 = sample(lambda t: sp_response(g, t_p, t)[0])
        d = abs(ise_trapezoid(tr7) - sp_ise(g, t_p))
        worst_ise = max(worst_ise, d)
        if d > 5e-4:
            bad.append(f"t_p={t_p}: ISE closed form vs trapezoid differ by {d:.2e}")
    report(3, bad, f"max |dPO| {worst_po:.1e}, max |dISE| {worst_ise:.1e}")


def _random_stable_sets(n=20, seed=20240611):
    rng = np.random.default_rng(seed)
    out = []
    for t_p in np.geomspace(0.1, 10.0, n):
        _, h_p = stability.proportional_limit(t_p)
        h = rng.uniform(0.0, 0.9) * h_p
        h_i = rng.uniform(0.05, 0.95) * stability.hi_stability_bounds(h, t_p).h_i_max
        out.append((float(t_p), float(h), float(h_i)))
    return out


def test_criterion_4_oracle_equivalence():
    bad = []
    worst = 0.0
    t = np.linspace(0.0, 7.0, 701)
    for t_p, h, h_i in _random_stable_sets():
        g = ControllerGains(h, h_i)
        exact = solve(constant_history(1.0, t_p), g, t_p, 7.0, 0.0, 1.0)
        p = oracle.DdeProblem(t_p, g, lambda s: np.ones_like(s), 7.0, dt=1e-4,
                              history_dot=lambda s: np.zeros_like(s), setpoint=0.0,
                              setpoint_before=1.0)
        d = float(np.max(np.abs(oracle.integrate(p)(t) - exact(t))))
        worst = max(worst, d)
        if d >= 1e-6:
            bad.append(f"mos vs oracle t_p={t_p:.3g} h={h:.3g} h_i={h_i:.3g}: {d:.2e}")
    # Matched SP: the loop is delay-free after one delay.
    worst_b = 0.0
    for t_p, h, X in ((1.0, 1.239, 1.849), (0.1, 1.239, 1.849), (10.0, 1.239, 1.849)):
        g = ControllerGains(h, X / t_p)
        f = lambda s, x: np.array([x[1], -((1 + h) * x[1] + g.h_i * x[0]) / t_p])
        ts, xs = oracle.integrate_ode(f, [1.0, 0.0], 6.0, dt=1e-3)
        d = float(np.max(np.abs(xs[:, 0] - sp_response(g, t_p, ts + 1.0)[0])))
        worst_b = max(worst_b, d)
        if d >= 1e-9:
            bad.append(f"oracle vs SP closed form t_p={t_p}: {d:.2e}")
    report(4, bad, f"max mos-oracle {worst:.1e}, SP closed form {worst_b:.1e}")


def _decays(t_p, h, h_i):
    p = oracle.DdeProblem(t_p, ControllerGains(h, h_i), lambda s: np.ones_like(s), 60.0,
                          dt=1e-2, history_dot=lambda s: np.zeros_like(s),
                          setpoint=0.0, setpoint_before=1.0, divergence_bound=1e12)
    tr = oracle.integrate(p)
    a = np.abs(tr.dy[(tr.t >= 30) & (tr.t < 45)]).max()
    b = np.abs(tr.dy[tr.t >= 45]).max()
    return b < a


def test_criterion_5_stability_boundary():
    bad = []
    for t_p in (0.1, 0.5, 1.0, 3.0, 10.0):
        _, h_p = stability.proportional_limit(t_p)
        for frac in (0.0, 0.2, 0.4, 0.6, 0.8):
            h = frac * h_p
            hmax = stability.hi_stability_bounds(h, t_p).h_i_max
            if not _decays(t_p, h, 0.99 * hmax):
                bad.append(f"t_p={t_p} h={h:.3f}: 0.99 h_i_max does not decay")
            if _decays(t_p, h, 1.01 * hmax):
                bad.append(f"t_p={t_p} h={h:.3f}: 1.01 h_i_max decays")
    if stability.ultimate_gain(0.0) != (math.pi, 1.0):
        bad.append(f"ultimate_gain(0) = {stability.ultimate_gain(0.0)}")
    d = abs(stability.hi_stability_bounds(0.0, 0.0).h_i_max - math.pi / 2)
    if d > 1e-10:
        bad.append(f"hi_stability_bounds(0, 0) off by {d:.2e}")
    report(5, bad, "25 grid points classified; t_p = 0 limits exact")


def test_criterion_6_headline_comparison(table1_rows):
    bad = []
    for r in table1_rows:
        i = r.ise_at_published
        if not i["proposed"] <= min(i["pi"], i["sp"]):
            bad.append(f"t_p={r.t_p} at printed gains: {i['proposed']:.4f} vs "
                       f"{i['pi']:.4f}/{i['sp']:.4f}")
        tuned = (r.prop.indices.ISE, r.pi.indices.ISE, r.sp.indices.ISE)
        if not tuned[0] <= min(tuned[1:]):
            bad.append(f"t_p={r.t_p} at tuned gains: {tuned}")
    report(6, bad, "13 rows at printed and at tuned gains")


def _vsc_trace(dt, k_i=0.272):
    cfg = runtime.RuntimeConfig(k_i=k_i, band=0.02, time_constant=1.0, delay=1.0)
    c = runtime.VariableStructureController(cfg, k_hat=1.0, r0=1.0)
    plant = runtime.FopdtPlant(1.0, 1.0, 1.0, dt, y0=1.0)
    return runtime.simulate(c, plant, lambda t: 0.0, 7.0)


def test_criterion_7_runtime_fidelity():
    bad = []
    ana = proposed.response(proposed.ProposedScenario(1.0, 0.272))
    out = _vsc_trace(1e-3)
    err = float(np.max(np.abs(out["y"] - ana(out["t"]))))
    if err >= 5e-3:
        bad.append(f"trace error {err:.2e}")
    switch = np.flatnonzero(np.diff(out["mode"]) != 0)
    if switch.size != 1:
        bad.append(f"expected one mode switch, saw {switch.size}")
    else:
        # Sample k + 1 is the last mode-one output; the switch happens within it.
        k = int(switch[0]) + 1
        r, y, u = out["r"][k + 1], out["y"][k + 1], out["u"]
        jump = u[k + 1] - (u[k] + 0.272 * (r - y) * 1e-3)
        if jump != 0.0:
            bad.append(f"switch discontinuity {jump!r}")

    cfg = runtime.RuntimeConfig(k_i=0.272, band=0.02, time_constant=1.0, delay=1.0)
    c = runtime.VariableStructureController(cfg, k_hat=1.0, r0=0.0)
    plant = runtime.FopdtPlant(2.0, 1.0, 1.0, 1e-2, y0=0.0)
    runtime.simulate(c, plant, lambda t: 1.0, 60.0)
    if abs(c.state.k_hat - 2.0) > 1e-3:
        bad.append(f"adapted gain {c.state.k_hat:.5f}, true 2")
    u_next = c.step(0.5, plant.y, 1e-2)
    if c.state.mode is not runtime.Mode.ONE or abs(u_next - 0.25) > 5e-4:
        bad.append(f"next mode-one output {u_next:.5f}, expected 0.25")
    report(7, bad, f"trace error {err:.1e}; bumpless; K_hat -> {c.state.k_hat:.5f}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
