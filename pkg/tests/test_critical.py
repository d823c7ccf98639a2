import io
import math

import numpy as np
import pytest
from scipy import integrate as sci_integrate
from scipy import special

from pi2asym import algebraic, critical
from pi2asym.core import S_LEFT, S_RIGHT, ScalePoint
from pi2asym.critical import HMProfile, SolitonEdgeParams, hastings_mcleod, y_edge_pii, y_edge_soliton
from pi2asym.errors import DomainError

SQ3 = math.sqrt(3.0)
SQ15 = math.sqrt(15.0)


@pytest.fixture(scope="module")
def hm():
    return hastings_mcleod()


def test_profile_invariants(hm):
    assert np.all(hm.q > 0)
    assert hm.ode_residual() <= 1e-6
    x = hm.grid
    right = x >= x[-1] - 2
    left = x <= x[0] + 2
    assert np.max(np.abs(hm.q[right] - special.airy(x[right])[0])) <= 1e-6
    assert np.max(np.abs(hm.q[left] - np.sqrt(-x[left] / 2))) <= 1e-3
    assert np.all(np.diff(hm.q) < 0)


def test_boundary_values():
    prof = critical.solve_hastings_mcleod(-8.0, 6.0)
    assert prof(6.0) == pytest.approx(special.airy(6.0)[0], abs=1e-8)
    assert prof(-8.0) == pytest.approx(2.0, abs=1e-3)


def test_q0_mesh_refinement_and_literature(hm):
    fine = critical.solve_hastings_mcleod(n=2 * (len(hm.grid) - 1))
    assert fine(0.0) == pytest.approx(hm(0.0), abs=1e-7)
    # widely quoted value of the Hastings-McLeod solution at the origin
    assert hm(0.0) == pytest.approx(0.3670615515, abs=1e-9)


def test_against_solve_bvp(hm):
    def f(x, y):
        return np.vstack([y[1], x * y[0] + 2 * y[0] ** 3])

    def bc(ya, yb):
        return np.array([ya[0] - math.sqrt(6.0), yb[0] - special.airy(10.0)[0]])

    x = np.linspace(-12, 10, 1001)
    y0 = np.vstack([hm(x) * 1.01, hm.derivative(x)])
    sol = sci_integrate.solve_bvp(f, bc, x, y0, tol=1e-10, max_nodes=100000)
    assert sol.success
    probe = np.linspace(-11, 9, 21)
    np.testing.assert_allclose(hm(probe), sol.sol(probe)[0], atol=1e-7)


def test_domain_checks(hm):
    with pytest.raises(DomainError):
        hm(20.0)
    with pytest.raises(DomainError):
        critical.solve_hastings_mcleod(-3.0, 10.0)


def test_csv_roundtrip(hm, tmp_path):
    path = tmp_path / "hm.csv"
    hm.to_csv(path)
    text = path.read_text()
    assert text.startswith("xi,q\n") and "\r" not in text
    back = HMProfile.from_csv(path)
    np.testing.assert_array_equal(back.q, hm.q)


def test_pii_edge_values(hm):
    t = 1e4
    far = y_edge_pii(10.0, t, hm)
    assert far.value == pytest.approx(2 * SQ3 * math.sqrt(t), abs=1e-8 * math.sqrt(t))
    r = y_edge_pii(0.0, t, hm)
    amp = hm(0.0) / (critical.C1 * t ** (1 / 12))
    assert abs(r.correction) <= amp * (1 + 1e-14)
    phase = t ** 1.75 * critical.OMEGA0
    assert r.correction == pytest.approx(-amp * math.cos(phase), rel=1e-6, abs=1e-9)
    alg = algebraic.y_algebraic(ScalePoint.from_st(S_LEFT, t))
    assert r.leading == pytest.approx(alg.leading, rel=1e-15)
    assert r.error_order == "t^-2/3"


def test_pii_edge_rejects_outside_window(hm):
    with pytest.raises(DomainError):
        y_edge_pii(15.0, 100.0, hm)


@pytest.mark.parametrize("xi, t", [(0.3, 1e4), (-2.0, 1e6)])
def test_edge_variable_roundtrip(xi, t):
    x = critical.x_from_xi_pii(xi, t)
    assert critical.xi_from_x_pii(x, t) == pytest.approx(xi, abs=1e-6)
    x = critical.x_from_xi_soliton(xi, t)
    assert critical.xi_from_x_soliton(x, t) == pytest.approx(xi, abs=1e-6)


def test_h0():
    assert math.exp(critical._log_hk(0)) == pytest.approx(math.pi ** -0.25, rel=1e-15)


def test_soliton_far_from_centres():
    t = 1e6
    r = y_edge_soliton(0.0, t)
    total = r.details["sech2_sum"]
    assert total <= critical.soliton_sum_bound(0.0, t)
    assert r.leading == pytest.approx(-2 / 3 * SQ15 * math.sqrt(t), rel=1e-15)
    alg = algebraic.y_algebraic(ScalePoint.from_st(S_RIGHT, t))
    assert r.leading == pytest.approx(alg.leading, rel=1e-14)
    assert abs(r.correction) < 1e-3 * abs(r.leading)


def test_soliton_half_integer_closed_form():
    t = 1e6
    X0 = critical.soliton_X(0, 0.5, t)
    exact = -math.log(math.sqrt(2 * math.pi) * math.pi ** -0.25) - 0.5 * math.log(critical.GAMMA)
    assert X0 == pytest.approx(exact, rel=1e-14)
    r = y_edge_soliton(0.5, t)
    assert r.details["near_half_integer"]


def test_soliton_kmax_and_domain():
    t = 1e8
    base = y_edge_soliton(1.3, t)
    alt = y_edge_soliton(1.3, t, SolitonEdgeParams(k_max=base.details["k_max"] + 5))
    assert abs(alt.value - base.value) <= 1e-12 * math.sqrt(t)
    with pytest.raises(DomainError):
        y_edge_soliton(0.0, 2.0)


def test_centred_soliton_ratio():
    t = 1e8
    xi = critical.soliton_center(1, t)
    r = y_edge_soliton(xi, t)
    assert r.correction / abs(r.leading) == pytest.approx(3.5, abs=1e-6)


def test_edge_constants():
    rep = critical.edge_constants_check()
    assert all(v["ok"] for v in rep.values())
    assert critical.C0 == pytest.approx(1.709975946, rel=1e-9)
    assert critical.OMEGA0 == pytest.approx(80 / 21 * math.sqrt(5) * 3 ** 0.75, rel=1e-15)
