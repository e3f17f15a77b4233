import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from outflowlab import eos
from outflowlab.errors import DomainError, RegimeError

CLOSURES = [("ideal-polytropic", {"gamma": 1.4}), ("van-der-waals", {}), ("power-law", {})]
states = st.tuples(st.floats(0.5, 2.0), st.floats(0.5, 2.0))


def gas(name, params):
    return eos.make_gas(name, **params)


def test_entropy_reference_point_is_zero(ideal):
    assert eos.entropy(ideal, eos.ThermoState(1.0, 1.0)) == pytest.approx(0.0, abs=1e-15)


def test_entropy_ideal_closed_form(ideal):
    # (R/(gamma-1)) ln(e^0.4) = 2.5 * 0.4
    assert eos.entropy(ideal, eos.ThermoState(1.0, math.exp(0.4))) == pytest.approx(1.0, rel=1e-14)


def test_generic_entropy_matches_independent_closed_form():
    # p = K theta / v^2, e = cv theta: s = cv ln(theta) + K (1 - 1/v) from the reference (1, 1)
    g = eos.make_gas("power-law", K=1.0, cv=2.5)
    for v, th in [(0.7, 1.3), (1.8, 0.6), (1.0, 2.0)]:
        s_exact = 2.5 * math.log(th) + (1.0 - 1.0 / v)
        assert g.entropy(v, th) == pytest.approx(s_exact, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("name,params", CLOSURES)
def test_entropy_loop_integral_vanishes(name, params):
    g = gas(name, params)

    def ds_v(v, th):
        return g.first_partials(v, th)[3]

    def ds_t(v, th):
        return g.first_partials(v, th)[5] / th

    v0, v1, t0, t1 = 0.8, 1.7, 0.6, 1.4
    loop = (quad(lambda v: ds_v(v, t0), v0, v1)[0] + quad(lambda t: ds_t(v1, t), t0, t1)[0]
            - quad(lambda v: ds_v(v, t1), v0, v1)[0] - quad(lambda t: ds_t(v0, t), t0, t1)[0])
    assert abs(loop) < 1e-8
    # entropy differences agree with an independent path integral
    path = quad(lambda v: ds_v(v, t0), v0, v1)[0] + quad(lambda t: ds_t(v1, t), t0, t1)[0]
    assert g.entropy(v1, t1) - g.entropy(v0, t0) == pytest.approx(path, rel=1e-8)


def test_ideal_partials_exact(ideal):
    d = eos.partials(ideal, eos.ThermoState(1.0, 1.0))
    assert d.p_theta == 1.0 and d.e_v == 0.0
    assert d.p_v == -1.0 and d.e_theta == pytest.approx(2.5)


def test_generic_second_derivative_accuracy():
    g = eos.make_gas("power-law")
    for v, th in [(1.0, 1.0), (0.6, 1.7), (1.9, 0.8)]:
        d = g.partials(v, th)
        assert abs(d.p_vv - 6 * th / v**4) / (6 * th / v**4) < 1e-6


def test_tilde_pv_ideal(ideal):
    td = eos.tilde_derivatives(ideal, eos.ThermoState(1.0, 1.0))
    assert td.p_v == pytest.approx(-1.4, rel=1e-14)
    assert td.e_ss > 0 and td.e_vv > 0


@pytest.mark.parametrize("gamma", [1.2, 1.4, 5.0 / 3.0])
@pytest.mark.parametrize("method", ["fd", "chain"])
def test_beta_closed_forms(gamma, method):
    g = eos.make_gas("ideal-polytropic", gamma=gamma)
    v, th = 1.0, 1.0
    p = th / v
    c = math.sqrt(gamma * th)
    rep = eos.check_conditions(g, eos.ThermoState(v, th), -c, method=method)
    assert rep.beta1 == pytest.approx(gamma**2 * p / v**2, rel=1e-5)
    assert rep.beta2 == pytest.approx((gamma - 1) ** 2 * (gamma - 0.25) * p**2 / v**2, rel=1e-5)
    assert rep.beta3 == pytest.approx((gamma - 1) ** 2 * gamma * (3 * gamma - 1) * p**3 / v**2, rel=1e-5)


def test_beta_frozen_values_gamma_14(ideal):
    rep = eos.check_conditions(ideal, eos.ThermoState(1.0, 1.0), -math.sqrt(1.4))
    assert rep.beta1 == pytest.approx(1.96, rel=1e-6)
    assert rep.beta2 == pytest.approx(0.184, rel=1e-6)
    assert rep.beta3 == pytest.approx(0.7168, rel=1e-6)


def test_sound_speed_and_mach(ideal):
    s = eos.ThermoState(1.0, 1.0)
    c, m = eos.sound_speed_mach(ideal, s, 0.0)
    assert c == pytest.approx(1.18322, abs=1e-5) and m == 0.0
    assert eos.sound_speed_mach(ideal, s, -c)[1] == 1.0


def test_check_conditions_ideal_all_pass(ideal):
    for v, th in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.7)]:
        c = math.sqrt(1.4 * th)
        rep = eos.check_conditions(ideal, eos.ThermoState(v, th), -c)
        assert rep.basic_ok and rep.transonic_extra_ok and rep.beta_ok and rep.minors_ok
        assert rep.minor3_closed == pytest.approx(rep.minors[2], rel=1e-9)


def test_negative_heat_capacity_flags_basic_failure():
    bad = eos.GasModel(pressure=lambda v, t: np.asarray(t) / np.asarray(v),
                       energy=lambda v, t: -np.asarray(t) + 0.0 * np.asarray(v))
    rep = eos.check_conditions(bad, eos.ThermoState(1.0, 1.0), -1.0)
    assert rep.basic_ok is False
    with pytest.raises(RegimeError):
        eos.tilde_derivatives(bad, eos.ThermoState(1.0, 1.0))


def test_domain_errors(ideal):
    with pytest.raises(DomainError):
        eos.ThermoState(-1.0, 1.0)
    with pytest.raises(DomainError):
        ideal.entropy(1.0, 0.0)
    with pytest.raises(DomainError):
        eos.make_gas("power-law").partials(1e-12, 1.0)


def test_report_serialises(ideal):
    rep = eos.check_conditions(ideal, eos.ThermoState(1.0, 1.0), -math.sqrt(1.4))
    import json
    d = json.loads(rep.to_json())
    assert set(["beta1", "beta2", "beta3", "minors", "matrix_A"]) <= set(d)


@pytest.mark.parametrize("name,params", CLOSURES)
@settings(max_examples=100, deadline=None)
@given(s=states)
def test_maxwell_compatibility(name, params, s):
    g = gas(name, params)
    d = g.partials(*s)
    assert abs(d.e_v - (s[1] * d.p_theta - d.p)) <= 1e-6 * (1 + abs(d.p))


@pytest.mark.parametrize("name,params", CLOSURES)
@settings(max_examples=30, deadline=None)
@given(s=states)
def test_entropy_round_trip(name, params, s):
    g = gas(name, params)
    th = g.theta_from_entropy(s[0], g.entropy(*s))
    assert th == pytest.approx(s[1], rel=1e-9)


@pytest.mark.parametrize("name,params", CLOSURES)
@settings(max_examples=50, deadline=None)
@given(s=states)
def test_energy_convex_in_v_s(name, params, s):
    td = eos.tilde_derivatives(gas(name, params), eos.ThermoState(*s))
    assert td.e_vv > 0 and td.e_ss > 0
    assert td.e_vv * td.e_ss - td.e_vs**2 >= -1e-9 * td.e_vv * td.e_ss


@settings(max_examples=50, deadline=None)
@given(s=states, gamma=st.floats(1.05, 3.0))
def test_transonic_equivalence(s, gamma):
    g = eos.make_gas("ideal-polytropic", gamma=gamma)
    st_ = eos.ThermoState(*s)
    c, _ = eos.sound_speed_mach(g, st_, 0.0)
    u = -c
    td = eos.tilde_derivatives(g, st_)
    assert -td.p_v == pytest.approx((u / s[0]) ** 2, rel=1e-12)


def test_registry_custom_closure():
    eos.register_closure("test-stiff", lambda: eos.GasModel(
        pressure=lambda v, t: 2 * np.asarray(t) / np.asarray(v),
        energy=lambda v, t: 3 * np.asarray(t) + 0.0 * np.asarray(v), name="test-stiff"))
    assert "test-stiff" in eos.registered_closures()
    g = eos.make_gas("test-stiff")
    assert g.partials(1.0, 1.0).p_theta == pytest.approx(2.0, rel=1e-9)
