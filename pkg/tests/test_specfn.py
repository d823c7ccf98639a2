import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from pi2asym import specfn
from pi2asym.errors import ConvergenceError, DomainError
from pi2asym.specfn import EllipticModulus, QuadratureSpec, integrate


@pytest.mark.parametrize("sigma", [0.0, 1e-8, 0.2, 0.5, 0.9, 0.999, 1 - 1e-12])
def test_K_E_match_scipy(sigma):
    # scipy uses the parameter m = sigma**2
    m = sigma * sigma
    assert specfn.elliptic_K(sigma) == pytest.approx(special.ellipk(m), rel=1e-13)
    assert specfn.elliptic_E(sigma) == pytest.approx(special.ellipe(m), rel=1e-13)


def test_near_one_uses_complement():
    sc = 1e-10
    m = EllipticModulus(math.sqrt(1 - sc * sc), sc)
    K = specfn.elliptic_K(m)
    # K ~ ln(4/sigma_c) for sigma_c -> 0
    assert K == pytest.approx(math.log(4 / sc), rel=1e-9)
    with mpmath.workdps(40):
        ref = float(mpmath.ellipk(1 - mpmath.mpf(sc) ** 2))
    assert K == pytest.approx(ref, rel=1e-12)


def test_special_values():
    assert specfn.elliptic_K(0.0) == pytest.approx(math.pi / 2, rel=1e-15)
    assert specfn.elliptic_E(0.0) == pytest.approx(math.pi / 2, rel=1e-15)
    assert specfn.elliptic_E(1.0) == 1.0
    with pytest.raises(DomainError):
        specfn.elliptic_K(1.0)
    with pytest.raises(DomainError):
        specfn.elliptic_Kprime(0.0)
    with pytest.raises(DomainError):
        EllipticModulus(1.5)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 0.99))
def test_legendre_relation(sigma):
    sc = math.sqrt(1 - sigma * sigma)
    K, E = specfn.elliptic_KE(sigma)
    Kp, Ep = specfn.elliptic_KE(sc)
    assert abs(E * Kp + Ep * K - K * Kp - math.pi / 2) < 1e-13
    assert specfn.elliptic_Kprime(sigma) == pytest.approx(Kp, rel=1e-15)


@pytest.mark.parametrize("tau", [0.3j, 1j, 2.5j, 0.2 + 1j])
@pytest.mark.parametrize("z", [0.0, 0.21, -0.4 + 0.3j, 1.7 - 0.2j])
def test_theta3_matches_mpmath(z, tau):
    q = mpmath.exp(1j * mpmath.pi * tau)
    ref = complex(mpmath.jtheta(3, mpmath.pi * z, q))
    d1 = complex(mpmath.jtheta(3, mpmath.pi * z, q, 1)) * math.pi
    d2 = complex(mpmath.jtheta(3, mpmath.pi * z, q, 2)) * math.pi ** 2
    th, t1, t2 = specfn.theta3_with_derivs(z, tau)
    assert abs(th - ref) <= 1e-13 * abs(ref)
    assert abs(t1 - d1) <= 1e-12 * max(1.0, abs(d1))
    assert abs(t2 - d2) <= 1e-12 * max(1.0, abs(d2))


def test_theta3_real_for_real_z_and_imaginary_tau():
    v = specfn.theta3(0.3, 1.5j)
    assert isinstance(v, float)
    arr = specfn.theta3_derivs(np.linspace(0, 1, 5), 1.5j, 2)
    assert arr.dtype == float and arr.shape == (5,)


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(-1, 1), st.floats(0.3, 4))
def test_theta3_quasi_periodicity(x, y, b):
    tau = 1j * b
    z = complex(x, y)
    th = specfn.theta3(z, tau)
    assert abs(specfn.theta3(z + 1, tau) / th - 1) < 1e-12
    shifted = specfn.theta3(z + tau, tau) * np.exp(1j * math.pi * tau + 2j * math.pi * z)
    assert abs(shifted / th - 1) < 1e-11


def test_log_theta_dd_consistent():
    tau = 0.8j
    for z in (0.0, 0.3, 0.45):
        th, d1, d2 = specfn.theta3_with_derivs(z, tau)
        assert specfn.log_theta3_dd(z, tau) == pytest.approx(d2 / th - (d1 / th) ** 2, rel=1e-14)


def test_theta_order_checked():
    with pytest.raises(DomainError):
        specfn.theta3_derivs(0.0, 1j, 3)


@pytest.mark.parametrize("x", [-30.0, -8.5, -8.0, -3.3, -0.5, 0.0, 0.7, 4.99, 5.0, 9.0, 20.0])
def test_airy_matches_scipy(x):
    ref = special.airy(x)[0]
    assert abs(specfn.airy(x) - ref) <= 1e-12 * max(1.0, abs(ref)) + 1e-300


def test_airy_relative_accuracy_right_tail():
    xs = np.linspace(0.0, 25.0, 251)
    np.testing.assert_allclose(specfn.airy(xs), special.airy(xs)[0], rtol=1e-12)


def test_airy_array():
    xs = np.linspace(-10, 10, 41)
    np.testing.assert_allclose(specfn.airy(xs), special.airy(xs)[0], atol=1e-12, rtol=1e-11)


@pytest.mark.parametrize(
    "f, a, b, exps, exact",
    [
        (np.exp, 0.0, 1.0, (0, 0), math.e - 1),
        (lambda x: np.sqrt(x), 0.0, 1.0, (0.5, 0), 2.0 / 3.0),
        (lambda x: np.sqrt(x * (1 - x)), 0.0, 1.0, (0.5, 0.5), math.pi / 8),
        (lambda x: 1 / np.sqrt(x), 0.0, 4.0, (-0.5, 0), 4.0),
        (lambda x: np.sqrt(1 - x) * x, 0.0, 1.0, (0, 0.5), 4.0 / 15.0),
        (lambda x: np.exp(1j * x), 0.0, math.pi, (0, 0), 2j),
    ],
)
def test_integrate_known(f, a, b, exps, exact):
    val, err = integrate(f, a, b, QuadratureSpec(endpoint_exponents=exps))
    assert abs(val - exact) <= 1e-12 * max(1.0, abs(exact))
    assert err < 1e-10


def test_integrate_reversed_and_empty():
    spec = QuadratureSpec(endpoint_exponents=(0.5, 0))
    fwd = integrate(np.sqrt, 0.0, 2.0, spec)[0]
    back = integrate(np.sqrt, 2.0, 0.0, QuadratureSpec(endpoint_exponents=(0, 0.5)))[0]
    assert back == pytest.approx(-fwd, rel=1e-14)
    assert integrate(np.sqrt, 1.0, 1.0) == (0.0, 0.0)


def test_quadrature_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec(rel_tol=0.0)
    tight = QuadratureSpec().tightened(100.0)
    assert tight.rel_tol == pytest.approx(1e-14)


def test_integrate_reports_failure():
    spec = QuadratureSpec(rel_tol=1e-15, abs_tol=1e-300, max_subdivisions=3)
    with pytest.raises(ConvergenceError) as info:
        integrate(lambda x: np.sin(1 / x), 1e-3, 1.0, spec)
    assert info.value.estimate is not None
