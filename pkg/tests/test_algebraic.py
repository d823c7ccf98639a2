import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pi2asym import algebraic
from pi2asym.algebraic import AlgebraicG, algebraic_g, g_algebraic, phase_theta, solve_z0
from pi2asym.core import S_LEFT, S_RIGHT, EDGE_WIDTH, Regime, ScalePoint, classify
from pi2asym.errors import BranchCutError, DomainError, RegimeError

SQ3 = math.sqrt(3.0)
SQ15 = math.sqrt(15.0)


def test_z0_special_values():
    assert solve_z0(0.0, -1) == 0.0
    # selected roots at the interval endpoints
    assert solve_z0(S_LEFT, 1) == pytest.approx(4 * SQ3, rel=1e-14)
    assert solve_z0(S_RIGHT, 1) == pytest.approx(-4 * SQ15 / 3, rel=1e-14)


def test_left_endpoint_factorisation():
    # z^3 - 24 z + 48 s at s = -2 sqrt 3 divided by (z - 4 sqrt 3)
    q = np.polydiv([1.0, 0.0, -24.0, 48 * S_LEFT], [1.0, -4 * SQ3])
    np.testing.assert_allclose(q[0], [1.0, 4 * SQ3, 24.0], rtol=1e-14)
    assert abs(q[1][-1]) < 1e-12
    assert (4 * SQ3) ** 2 - 4 * 24 < 0


@settings(max_examples=80, deadline=None)
@given(st.floats(-50, 50), st.sampled_from([-1, 1]))
def test_cubic_residual(s, sign_t):
    if sign_t > 0 and S_LEFT < s < S_RIGHT:
        with pytest.raises(RegimeError):
            solve_z0(s, sign_t)
        return
    z = solve_z0(s, sign_t)
    assert abs(z ** 3 - 24 * sign_t * z + 48 * s) <= 1e-11 * max(1.0, abs(z) ** 3)


@settings(max_examples=60, deadline=None)
@given(st.floats(-40, 40), st.floats(0.01, 5))
def test_z0_decreasing_for_negative_t(s, ds):
    assert solve_z0(s + ds, -1) < solve_z0(s, -1)


@pytest.mark.parametrize("side", [(-30.0, -5.0), (0.3, 30.0)])
def test_z0_decreasing_on_each_positive_t_branch(side):
    s = np.linspace(*side, 60)
    z = np.array([solve_z0(v, 1) for v in s])
    assert np.all(np.diff(z) < 0)


def test_branch_selection_for_positive_t():
    assert solve_z0(-4.0, 1) >= 2 * math.sqrt(2)
    assert solve_z0(1.0, 1) <= -2 * math.sqrt(2)


def test_coefficients():
    G = AlgebraicG(2.0, -1, 0.0)
    assert G.c1 == 1 / 105
    assert G.c2 == pytest.approx(2 / 30)
    assert G.c3 == pytest.approx(4 / 24 + 1 / 3)


def test_g_values():
    G = algebraic_g(3.0, -1)
    assert g_algebraic(G.z0, G) == 0
    assert g_algebraic(G.z0 + 1, G) == pytest.approx(G.c1 + G.c2 + G.c3, rel=1e-15)
    # cross-check at higher precision
    with mpmath.workdps(40):
        Gm = AlgebraicG(mpmath.mpf(G.z0), -1, 3.0)
        ref = g_algebraic(Gm.z0 + 1, Gm)
    assert float(ref) == pytest.approx(G.c1 + G.c2 + G.c3, rel=1e-15)


def test_g_cut_needs_side():
    G = algebraic_g(3.0, -1)
    with pytest.raises(BranchCutError):
        g_algebraic(G.z0 - 1, G)
    gp = g_algebraic(G.z0 - 1, G, "+")
    gm = g_algebraic(G.z0 - 1, G, "-")
    assert gp == pytest.approx(-gm)
    # off-axis points approach the boundary values
    assert g_algebraic(complex(G.z0 - 1, 1e-12), G) == pytest.approx(gp, abs=1e-9)


def test_phase_theta_values():
    assert phase_theta(1.0, 0.0, 0.0) == pytest.approx(1 / 105)
    assert phase_theta(4.0, 1.0, 3.0) == pytest.approx(128 / 105 - 8 + 2, rel=1e-15)


def test_g_matches_phase_at_infinity():
    # |t|^{7/4} g(zeta) - theta(|t|^{1/2} zeta) decays like zeta^{-1/2}
    s, sign_t, t = 3.0, -1, -1.0
    x = s * abs(t) ** 1.5
    with mpmath.workdps(60):
        z0 = mpmath.findroot(lambda z: z ** 3 - 24 * sign_t * z + 48 * s, solve_z0(s, sign_t))
        G = AlgebraicG(z0, sign_t, s)
        zetas = [mpmath.mpf(10) ** k for k in (3, 4, 5, 6)]
        diffs = [abs(g_algebraic(z, G) - phase_theta(z, x, t)) for z in zetas]
        slopes = [float(mpmath.log(diffs[i + 1] / diffs[i]) / mpmath.log(10)) for i in range(3)]
    assert all(abs(v + 0.5) < 1e-2 for v in slopes)


def test_sign_condition_examples():
    assert algebraic.check_proposition_g(algebraic_g(5.0, -1)).ok
    assert algebraic.check_proposition_g(algebraic_g(0.6, 1)).ok
    # at z0 = 4 sqrt 3 the discriminant is -(1/315)(16/5)
    G = AlgebraicG(4 * SQ3, 1, S_LEFT)
    rep = algebraic.check_proposition_g(G)
    assert rep.disc1 == pytest.approx(-(1 / 315) * (16 / 5), rel=1e-12)


def test_sign_scan_rejects_oscillatory_interval():
    with pytest.raises(RegimeError):
        algebraic.check_proposition_g(AlgebraicG(0.0, 1, 0.0))


@pytest.mark.parametrize("s, t, expected", [(0.0, -100.0, 0.0), (S_LEFT, 1e4, 200 * SQ3)])
def test_y_algebraic_values(s, t, expected):
    r = algebraic.y_algebraic(ScalePoint.from_st(s, t))
    assert r.leading == pytest.approx(expected, abs=1e-12, rel=1e-14)
    assert r.error_order == "|t|^-1"


def test_y_algebraic_leading_relation():
    # x = t y - y^3/6 at leading order
    p = ScalePoint.from_st(1.0, -1e4)
    y = algebraic.y_algebraic(p).leading
    assert p.t * y - y ** 3 / 6 == pytest.approx(p.x, rel=1e-12)


def test_y_algebraic_rejects_elliptic_points():
    with pytest.raises(RegimeError):
        algebraic.y_algebraic(ScalePoint.from_st(0.0, 5.0))


@pytest.mark.parametrize(
    "s, t, regime",
    [
        (5.0, -10.0, Regime.ALGEBRAIC_NEG_T),
        (0.0, 10.0, Regime.ELLIPTIC),
        (S_LEFT, 10.0, Regime.EDGE_PII),
        (S_RIGHT + 0.01, 10.0, Regime.EDGE_SOLITON),
        (1.0, 10.0, Regime.ALGEBRAIC_POS_T),
    ],
)
def test_classify(s, t, regime):
    assert classify(ScalePoint.from_st(s, t), EDGE_WIDTH) is regime


def test_scale_point_consistency():
    p = ScalePoint.from_xt(8.0, 4.0)
    assert p.s == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(DomainError):
        ScalePoint.from_xt(1.0, 0.0)
