import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spp_sim import units as u
from spp_sim.errors import NonPositiveArgumentError, ProtectionViolatedError
from spp_sim.graphene import Emitter, GrapheneModel, dispersion_q
from spp_sim.planner import (PulsePlan, plan_train, pulse_count_for,
                             survival_budget, validate_protection)

GAMMA = 1e12


@pytest.fixture(scope="module")
def plan():
    return plan_train(GrapheneModel(0.5, 0.5), Emitter(), 500.0)


def test_pulse_count(plan):
    assert plan.n_p == 7
    assert plan.pulse_count == 15
    assert len(plan.q_n) == plan.n_p + 1


def test_construction_constraint(plan):
    k_sp = float(dispersion_q(GrapheneModel(0.5, 0.5), 0.5))
    total = -(plan.n_p + 1) * np.array(plan.k1) + plan.n_p * np.array(plan.k2)
    assert np.linalg.norm(total - [0.0, k_sp]) <= 1e-12 * k_sp
    assert np.hypot(*plan.k1) <= 2 * math.pi / 500.0


def test_intermediate_ordering(plan):
    mags = plan.q_magnitudes()
    assert np.all(np.diff(mags) > 0)
    d = np.array(plan.delta_n)
    assert d[-1] == 0.0
    assert np.all(np.diff(d) < 0) and np.all(d[:-1] > 0)


def test_last_detuning(plan):
    # 0.0345 eV: within 15 % of 0.035 eV; note this is ~52 gamma, not ~10 gamma
    assert plan.delta_n[-2] == pytest.approx(0.035, rel=0.15)
    assert u.ev_to_rate(plan.delta_n[-2]) / GAMMA == pytest.approx(52.5, rel=0.01)


def test_single_pulse_for_long_spp():
    model = GrapheneModel(0.5, 0.5)
    em = Emitter(omega_sg=0.01)          # lambda_sp ~ 90 um > lambda_es
    p = plan_train(model, em, 500.0 * 1e2)
    assert p.pulse_count == 1 and p.delta_n == [0.0]
    assert pulse_count_for(500.0, 1000.0) == 0


@settings(max_examples=50, deadline=None)
@given(st.floats(1.0, 1e4), st.floats(1.0, 1e3))
def test_pulse_count_odd_and_sufficient(lam_es, lam_sp):
    n_p = pulse_count_for(lam_es, lam_sp)
    count = 2 * n_p + 1
    assert count % 2 == 1 and count >= 1
    # enough pulses to write lambda_sp, and one pair fewer would not be
    assert count * lam_sp >= lam_es * (1 - 1e-9)
    if n_p > 0:
        assert (count - 2) * lam_sp < lam_es


def test_survival_example():
    # Delta = 10 gamma, varpi = 0.1 gamma, 1 ns dwell: loss ~ 0.1 per step
    d = u.rate_to_ev(10 * GAMMA)
    p = PulsePlan(500.0, (0.0, -0.01), (0.0, 0.01), 1, 3, [(0, 0.01), (0, 0.03)], [d, 0.0])
    s = survival_budget(p, 0.1 * GAMMA, GAMMA, 1e-9)
    assert s == pytest.approx(math.exp(-0.01 * 1e12 / 101 * 1e-9), rel=1e-12)
    assert s == pytest.approx(0.9, abs=0.01)
    assert p.gamma_n == [pytest.approx(0.01 * GAMMA / 101)]
    assert survival_budget(p, 0.0, GAMMA) == 1.0


def test_survival_monotone(plan):
    values = [survival_budget(plan, 0.1 * GAMMA, GAMMA, tau) for tau in (0, 1e-10, 1e-9, 1e-8)]
    assert values[0] == 1.0
    assert all(a > b for a, b in zip(values, values[1:]))


def test_protection_of_the_15_pulse_plan(plan):
    model, em = GrapheneModel(0.5, 0.5), Emitter()
    rep = validate_protection(plan, model, em)
    assert rep.protected
    assert all(rep.outside_light_cone) and all(rep.below_resonance)
    assert rep.light_cone == pytest.approx(2.53e-3, rel=0.01)
    # the free-photon detuning exceeds the SPP detuning everywhere, but the
    # first step only by ~5x
    assert all(r > 1 for r in rep.ratio)
    assert rep.ratio[0] == pytest.approx(4.81, rel=0.01)
    assert rep.ratio_ok[0] is False and all(rep.ratio_ok[1:])


def test_protection_violated_for_long_wavelength():
    model, em = GrapheneModel(0.5, 0.5), Emitter()
    p = plan_train(model, em, 50_000.0)
    with pytest.raises(ProtectionViolatedError) as info:
        validate_protection(p, model, em)
    assert info.value.report is not None
    assert not info.value.report.outside_light_cone[0]
    rep = validate_protection(p, model, em, raise_on_violation=False)
    assert not rep.protected


def test_infeasible_and_invalid():
    model = GrapheneModel(0.5, 0.5)
    with pytest.raises(NonPositiveArgumentError):
        plan_train(model, Emitter(), 0.0)
    # lambda_es below lambda_sp: one pulse already carries enough wavenumber
    p = plan_train(model, Emitter(), 20.0)
    assert p.pulse_count == 1
    assert np.hypot(*p.k1) <= 2 * math.pi / 20.0


def test_json_and_table(plan, tmp_path):
    text = plan.to_json()
    data = json.loads(text)
    for key in ("lambda_es", "k1", "k2", "n_p", "pulse_count", "q_n", "delta_n",
                "gamma_n", "pulse_duration", "survival", "convention"):
        assert key in data
    plan.to_json(tmp_path / "plan.json")
    assert (tmp_path / "plan.json").read_text().strip() == text.strip()
    table = plan.table()
    assert "15 pulses" in table
    assert len(table.splitlines()) == 2 + len(plan.q_n) + 1
