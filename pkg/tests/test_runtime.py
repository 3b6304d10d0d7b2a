import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from delayloop import proposed
from delayloop.runtime import (FopdtPlant, Mode, RuntimeConfig, VariableStructureController,
                               adapt_gain, simulate)


def _loop(dt, k_i=0.272, rule="predicted", T_p=1.0, t_end=7.0, K=1.0, k_hat=1.0):
    cfg = RuntimeConfig(k_i=k_i, band=0.02, time_constant=T_p, delay=1.0, switch_on=rule)
    c = VariableStructureController(cfg, k_hat=k_hat, r0=1.0)
    plant = FopdtPlant(K, T_p, 1.0, dt, y0=1.0)
    return c, simulate(c, plant, lambda t: 0.0, t_end)


def test_setpoint_drop_engages_mode_one():
    cfg = RuntimeConfig(k_i=0.3, time_constant=1.0, delay=1.0)
    c = VariableStructureController(cfg, k_hat=2.0, r0=1.0)
    assert c.step(0.0, 1.0, 1e-3) == 0.0
    assert c.state.mode is Mode.ONE
    assert c.state.accumulator == 0.0


def test_matches_analytic_trace_and_converges():
    ana = proposed.response(proposed.ProposedScenario(1.0, 0.272))
    errs = []
    for dt in (2e-3, 1e-3):
        _, out = _loop(dt)
        errs.append(np.max(np.abs(out["y"] - ana(out["t"]))))
    assert errs[1] < 5e-3
    assert errs[0] / errs[1] >= 1.8


def test_measured_switch_lags_by_a_delay():
    ana = proposed.response(proposed.ProposedScenario(1.0, 0.272))
    _, out = _loop(1e-3, rule="measured")
    assert np.max(np.abs(out["y"] - ana(out["t"]))) > 5e-3
    t_switch = out["t"][np.argmax(out["mode"] == 2)]
    # The measured output enters the band one delay after the predicted one.
    assert t_switch == pytest.approx(1 + math.log(50), abs=2e-3)


def test_predicted_switch_time():
    _, out = _loop(1e-3)
    t_switch = out["t"][np.argmax(out["mode"] == 2)]
    assert t_switch == pytest.approx(math.log(50), abs=2e-3)


@settings(max_examples=10)
@given(k_i=st.floats(0.05, 0.4), T_p=st.floats(0.3, 3.0))
def test_bumpless_and_zero_steady_error(k_i, T_p):
    c, out = _loop(1e-2, k_i=k_i, T_p=T_p, t_end=120.0)
    modes = out["mode"]
    for k in np.flatnonzero(np.diff(modes) == 1) + 1:
        # The first integrator output differs from the last mode-one output by its own increment only.
        u = out["u"]
        assert u[k + 1] == u[k] + k_i * (out["r"][k + 1] - out["y"][k + 1]) * 1e-2
    assert np.all(np.abs(out["y"][-500:]) < 1e-3)


def test_adapt_gain_rules():
    n = 50
    assert adapt_gain(1.0, np.ones(n), np.full(n, 1.0), np.full(n, 0.5), 0.02) == 2.0
    osc = 1.0 + 0.1 * np.sin(np.arange(n))
    assert adapt_gain(1.0, np.ones(n), osc, np.full(n, 0.5), 0.02) == 1.0
    assert adapt_gain(1.0, np.ones(n), np.zeros(n), np.zeros(n), 0.02) == 1.0
    moving_r = np.linspace(0, 1, n)
    assert adapt_gain(1.0, moving_r, np.full(n, 1.0), np.full(n, 0.5), 0.02) == 1.0


def test_gain_mismatch_is_learned():
    cfg = RuntimeConfig(k_i=0.272, time_constant=1.0, delay=1.0)
    c = VariableStructureController(cfg, k_hat=1.0, r0=0.0)
    plant = FopdtPlant(2.0, 1.0, 1.0, 1e-2)
    out = simulate(c, plant, lambda t: 1.0, 60.0)
    assert abs(out["y"][-1] - 1.0) < 1e-3
    assert c.state.k_hat == pytest.approx(2.0, abs=1e-3)
    assert c.step(0.5, plant.y, 1e-2) == pytest.approx(0.25, abs=5e-4)


def test_saturation_is_logged_not_clamped_silently(caplog):
    cfg = RuntimeConfig(k_i=0.1, time_constant=1.0, delay=1.0, u_max=0.5)
    c = VariableStructureController(cfg, k_hat=1.0, r0=0.0)
    assert c.step(1.0, 0.0, 1e-2) == 0.5
    assert c.state.saturation_events == 1
    assert "beyond" in caplog.text


def test_plant_is_exact_zoh():
    p = FopdtPlant(2.0, 1.0, 0.5, 0.1)
    ys = [p.step(1.0) for _ in range(20)]
    # Output stays at 0 for the delay, then follows 2 (1 - e^{-(t - L)}).
    assert ys[4] == 0.0
    assert ys[-1] == pytest.approx(2 * (1 - math.exp(-1.5)), abs=1e-12)


def test_validation():
    with pytest.raises(ValueError):
        RuntimeConfig(k_i=0.1)
    with pytest.raises(ValueError):
        RuntimeConfig(k_i=0.1, switch_on="later")
    cfg = RuntimeConfig(k_i=0.1, switch_on="measured")
    with pytest.raises(ValueError):
        VariableStructureController(cfg, k_hat=0.0)
    c = VariableStructureController(cfg, k_hat=1.0)
    with pytest.raises(ValueError):
        c.step(math.nan, 0.0, 0.01)
    with pytest.raises(ValueError):
        c.step(0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        FopdtPlant(1.0, 1.0, 1.0, 0.3)
