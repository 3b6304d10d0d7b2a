import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from delayloop import oracle
from delayloop.core import ControllerGains
from delayloop.proposed import (ProposedScenario, first_mode, first_mode_ise, mode_switch_history,
                                proposed_ise, proposed_overshoots, response, second_mode_solve,
                                steadiness_index)
from delayloop.tuning import TABLE1


def test_switch_time():
    scn = ProposedScenario(1.0, 0.272)
    assert scn.t_q == pytest.approx(math.log(50))
    assert scn.t_switch == pytest.approx(1 + math.log(50))
    y, t_q = first_mode(1.0)
    assert y(1 + t_q) == pytest.approx(0.02)


def test_history_is_the_first_mode_window():
    scn = ProposedScenario(0.4, 0.1)
    y1, t_q = first_mode(0.4)
    hist = mode_switch_history(scn)
    s = np.linspace(-1, 0, 21)
    assert np.allclose(hist(s), y1(s + 1 + t_q), atol=1e-15)


def test_overshoot_at_table_point():
    # DERIVED: the t_p = 1 row sits on the PO_y = 0.0105 curve.
    po_y, po_v = proposed_overshoots(ProposedScenario(1.0, 0.272))
    assert po_y == pytest.approx(0.01054, abs=2e-5)
    assert po_v < 0.1
    assert steadiness_index(ProposedScenario(1.0, 0.272)) == pytest.approx(0.02, abs=1e-12)


@given(t_p=st.floats(0.05, 20), t_s=st.floats(2, 12))
def test_first_mode_ise_matches_quadrature(t_p, t_s):
    y, t_q = first_mode(t_p)
    end = min(1 + t_q, t_s)
    ref = quad(lambda t: y(t) ** 2, 0, end, points=[1.0], epsabs=1e-12)[0]
    assert first_mode_ise(t_p, t_q, t_s) == pytest.approx(ref, abs=1e-9)


@pytest.mark.parametrize("row", TABLE1, ids=lambda r: f"tp{r[0]}")
def test_table1_proposed_ise(row):
    # Published proposed ISE at the published h_i.
    t_p, h_i = row[0], row[5]
    tol = 1e-3 if t_p >= 2.5 else 5e-3
    assert proposed_ise(ProposedScenario(t_p, h_i)) == pytest.approx(row[8], abs=tol)


@settings(max_examples=8)
@given(t_p=st.floats(0.2, 5.0), h_i=st.floats(0.05, 0.5))
def test_second_mode_matches_oracle(t_p, h_i):
    scn = ProposedScenario(t_p, h_i)
    y1, t_q = first_mode(t_p)
    hist = lambda s: y1(s + 1 + t_q)
    hist_dot = lambda s: np.where(s + 1 + t_q <= 1, 0.0, -y1(s + 1 + t_q) / t_p)
    tr = oracle.integrate(oracle.DdeProblem(t_p, ControllerGains(0.0, h_i), hist, 6.0,
                                            dt=1e-3, history_dot=hist_dot))
    t = np.linspace(0, 6, 61)
    assert np.max(np.abs(tr(t) - second_mode_solve(scn)(t))) < 1e-6


def test_whole_response_is_continuous_at_switch():
    scn = ProposedScenario(1.0, 0.272)
    y = response(scn)
    ts = scn.t_switch
    assert y(ts - 1e-12) == pytest.approx(y(ts), abs=1e-9)
    assert y(0.5) == 1.0


def test_scenario_validation():
    with pytest.raises(ValueError):
        ProposedScenario(1.0, 0.2, B_s=1.5)
    with pytest.raises(ValueError):
        ProposedScenario(1.0, -0.2)


def test_response_extends_its_solution_on_demand():
    y = response(ProposedScenario(2.5, 0.3084))
    assert y(11.0) == pytest.approx(y(np.array([11.0, 14.0]))[0])
    assert abs(y(14.0)) < 0.02
