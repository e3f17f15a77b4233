import math

import numpy as np
import pytest

from outflowlab import stationary as S
from outflowlab.errors import AdmissibilityError, RegimeError
from outflowlab.ode import riccati_closed_form, rk4_scalar_grid

# literal oracle values for the ideal gas gamma = 1.4, R = mu = kappa = 1, W_+ = (1, 1)
A_PLUS = 1.2742325686676097
A_PLUS_PRINTED = 2.3360930425572843
LAMBDA2 = -3.296101593441215


def test_rhs_vanishes_at_far_field(transonic_spec):
    g1, g2 = S.rhs(transonic_spec, 1.0, 1.0)
    assert g1 == 0.0 and g2 == 0.0


def test_rhs_direct_value(transonic_spec):
    g1, g2 = S.rhs(transonic_spec, 1.1, 1.0)
    assert g1 == pytest.approx(-0.04148939068667261, rel=1e-13)
    assert g2 == pytest.approx(-0.11003908396565286, rel=1e-13)


@pytest.mark.parametrize("mach", [0.7, 1.0, 1.3])
def test_jacobian_matches_finite_differences(ideal, mach):
    sp = S.FarFieldSpec.from_mach(ideal, S.PhysicalParams(), 1.0, 1.0, mach)
    J, _ = S.jacobian_plus(sp)
    h = 1e-6
    fd = np.empty((2, 2))
    for j, (dv, dt) in enumerate([(h, 0), (0, h)]):
        gp = S.rhs(sp, 1 + dv, 1 + dt)
        gm = S.rhs(sp, 1 - dv, 1 - dt)
        fd[:, j] = [(gp[0] - gm[0]) / (2 * h), (gp[1] - gm[1]) / (2 * h)]
    assert np.max(np.abs(fd - J)) < 1e-6


def test_transonic_determinant_vanishes(transonic_spec):
    J, reg = S.jacobian_plus(transonic_spec)
    assert reg.kind == S.TRANSONIC
    assert abs(reg.detJ) < 1e-10 * np.max(np.abs(J)) ** 2
    assert reg.detJ_formula == pytest.approx(reg.detJ, abs=1e-12)


@pytest.mark.parametrize("factor,kind", [(1.2, S.SUPERSONIC), (0.8, S.SUBSONIC)])
def test_regime_eigen_patterns(ideal, factor, kind):
    sp = S.FarFieldSpec.from_mach(ideal, S.PhysicalParams(), 1.0, 1.0, factor)
    _, reg = S.jacobian_plus(sp)
    l1, l2 = reg.eigenvalues
    assert reg.kind == kind
    if kind == S.SUPERSONIC:
        assert reg.detJ > 0 and l1 < l2 < 0
    else:
        assert reg.detJ < 0 and l1 < 0 < l2
    assert reg.discriminant >= reg.discriminant_bound > 0


def test_sweep_passes_through_transonic_once(ideal):
    factors = np.linspace(1.5, 0.5, 101)
    regs = S.classify_sweep(ideal, S.PhysicalParams(), 1.0, 1.0, factors)
    kinds = [r.kind for r in regs]
    assert kinds.count(S.TRANSONIC) == 1
    i = kinds.index(S.TRANSONIC)
    assert set(kinds[:i]) == {S.SUPERSONIC} and set(kinds[i + 1:]) == {S.SUBSONIC}
    for r in regs:
        if r.kind != S.TRANSONIC:
            assert np.sign(r.detJ) == np.sign(r.mach - 1)


def test_nonexistence_for_nonnegative_u(ideal):
    for u in (0.0, 0.5):
        with pytest.raises(AdmissibilityError, match="no stationary solution"):
            S.FarFieldSpec(1.0, 1.0, u, ideal)


def test_center_manifold_data(transonic_spec):
    cm = S.transonic_reduction(transonic_spec)
    J, _ = S.jacobian_plus(transonic_spec)
    D = cm.B_inv @ J @ cm.B
    assert abs(D[0, 1]) < 1e-10 and abs(D[1, 0]) < 1e-10 and abs(D[0, 0]) < 1e-10
    assert D[1, 1] == pytest.approx(cm.lambda2, rel=1e-12)
    assert cm.lambda2 == pytest.approx(LAMBDA2, rel=1e-12)
    assert cm.a_plus == pytest.approx(A_PLUS, rel=1e-9)
    assert cm.a_plus_printed == pytest.approx(A_PLUS_PRINTED, rel=1e-9)


def test_a_plus_by_differencing_the_reduced_field(transonic_spec):
    # y1' = -a_+ y1^2 + O(y1^3): second difference of the reduced field through G
    cm = S.transonic_reduction(transonic_spec)
    f = S.reduced_field(transonic_spec, cm)
    h = 1e-3
    a_fd = -(f(0, h) + f(0, -h) - 2 * f(0, 0.0)) / (2 * h * h)
    assert a_fd == pytest.approx(cm.a_plus, rel=1e-5)


def test_center_manifold_invariance(transonic_spec):
    """Off-manifold drift after unit reduced time scales like y1^3."""
    cm = S.transonic_reduction(transonic_spec)
    errs = []
    for y1 in (0.02, 0.01):
        W0 = np.array([1.0, 1.0]) + cm.B @ np.array([y1, cm.h2 * y1**2])
        x = np.linspace(0, 1.0 / (cm.a_plus * y1), 2001)
        v, th = S._march2(transonic_spec, x, W0[0], W0[1], 2)
        Y = cm.B_inv @ np.vstack([v - 1.0, th - 1.0])
        errs.append(np.max(np.abs(Y[1] - cm.h2 * Y[0] ** 2)))
    assert errs[0] / errs[1] > 6.0


def test_riccati_benchmark():
    a, y0 = A_PLUS, 0.1
    xe = 10 / (a * y0)
    x = np.linspace(0, xe, 4001)
    y = rk4_scalar_grid(lambda _x, y: -a * y * y, x, y0, substeps=4)
    assert abs(y[-1] - riccati_closed_form(a, y0, xe)) / riccati_closed_form(a, y0, xe) < 1e-8


def test_transonic_profile_properties(transonic_profile):
    p = transonic_profile
    rep = S.verify_profile(p)
    assert rep.mass_residual < 1e-8
    assert rep.momentum_residual_rel < 1e-6
    assert rep.monotone
    assert abs(rep.decay["slope_k0"] + 1) < 0.05
    assert abs(rep.decay["slope_k1"] + 2) < 0.2
    a = rep.asymptotics
    assert a["a1_variation"] < 0.1 and a["a2_variation"] < 0.1
    assert a["a1_positive"] and a["a2_positive"]
    assert a["u_x_positive_tail"] and a["theta_x_positive_tail"]
    assert 0 < a["z_lower_c"] <= a["z_upper_C"] < np.inf
    assert p.meta["step_halving_change"] < 1e-7
    assert p.u_minus == pytest.approx(p.u[0]) and p.theta_minus == p.theta[0]
    assert p.L == pytest.approx(50 / (A_PLUS * 0.1))


def test_reduced_and_full_methods_agree(transonic_spec):
    full = S.build_transonic_profile(transonic_spec, 0.02, L=200, N=1024, validate=False)
    red = S.build_transonic_profile(transonic_spec, 0.02, L=200, N=1024, method="reduced")
    assert np.max(np.abs(full.v - red.v)) < 0.02**3 * 10


def test_zero_seed_gives_constant_profile(transonic_spec):
    p = S.build_transonic_profile(transonic_spec, 0.0, L=50, N=64)
    assert np.all(p.v == 1.0) and np.all(p.theta == 1.0) and p.delta == 0.0
    rep = S.verify_profile(p)
    assert max(rep.mass_residual, rep.momentum_residual, rep.energy_residual) < 1e-13


def test_transonic_rejections(transonic_spec, ideal):
    with pytest.raises(AdmissibilityError, match="blow-up"):
        S.build_transonic_profile(transonic_spec, -0.01)
    with pytest.raises(AdmissibilityError, match="delta0"):
        S.build_transonic_profile(transonic_spec, 0.5)
    with pytest.raises(AdmissibilityError, match="too coarse"):
        S.build_transonic_profile(transonic_spec, 0.1, N=64)
    sup = S.FarFieldSpec.from_mach(ideal, S.PhysicalParams(), 1.0, 1.0, 1.2)
    with pytest.raises(RegimeError):
        S.transonic_reduction(sup)


@pytest.mark.parametrize("mach", [1.3, 0.7])
def test_nondegenerate_exponential_rate(ideal, mach):
    sp = S.FarFieldSpec.from_mach(ideal, S.PhysicalParams(), 1.0, 1.0, mach)
    p = S.build_nondegenerate_profile(sp, 0.05)
    rep = S.verify_profile(p)
    lam = max(l for l in p.meta["stable_eigenvalues"])
    assert rep.decay["rate"] == pytest.approx(lam, rel=0.05)
    assert rep.mass_residual < 1e-8
    assert p.meta["step_halving_change"] < 1e-7


def test_nondegenerate_zero_and_bounds(ideal):
    sp = S.FarFieldSpec.from_mach(ideal, S.PhysicalParams(), 1.0, 1.0, 0.7)
    p = S.build_nondegenerate_profile(sp, 0.0, N=64)
    assert np.all(p.v == 1.0)
    with pytest.raises(AdmissibilityError):
        S.build_nondegenerate_profile(sp, 0.3)


def test_csv_round_trip(tmp_path, small_transonic_profile):
    p = small_transonic_profile
    p.write(tmp_path)
    d = S.read_profile_csv(tmp_path / "profile.csv")
    assert np.array_equal(d["v"], p.v) and np.array_equal(d["theta_x"], p.theta_x)
    assert np.array_equal(d["z"], p.z)
    import json
    hdr = json.loads((tmp_path / "profile.json").read_text())
    assert hdr["regime"]["kind"] == S.TRANSONIC and hdr["a_plus"] == pytest.approx(A_PLUS)
