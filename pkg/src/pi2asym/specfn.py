"""Special functions and quadrature.

Complete elliptic integrals (arithmetic-geometric mean), the third Jacobi
theta function and its z-derivatives (direct series), the Airy function
Ai, and an adaptive Gauss-Legendre quadrature that removes half-integer
algebraic endpoint singularities by a square-root substitution.

Elliptic integrals take the *modulus* ``sigma`` (not the parameter
``m = sigma**2``), matching the notation used throughout the package.
"""

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = [
    "EllipticModulus",
    "QuadratureSpec",
    "elliptic_K",
    "elliptic_E",
    "elliptic_Kprime",
    "elliptic_KE",
    "theta3",
    "theta3_derivs",
    "theta3_with_derivs",
    "log_theta3_dd",
    "airy",
    "integrate",
]

_EPS = np.finfo(float).eps


# ---------------------------------------------------------------------------
# complete elliptic integrals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EllipticModulus:
    """Elliptic modulus ``0 <= sigma <= 1``.

    ``sigma_c`` optionally carries the complementary modulus
    ``sqrt(1 - sigma**2)`` when the caller knows it more accurately than
    the subtraction would give (near ``sigma = 1``).
    """

    sigma: float
    sigma_c: float = None

    def __post_init__(self):
        if not 0.0 <= self.sigma <= 1.0:
            raise DomainError(f"modulus {self.sigma!r} outside [0, 1]")
        if self.sigma_c is None:
            s = self.sigma
            object.__setattr__(self, "sigma_c", math.sqrt((1.0 - s) * (1.0 + s)))


def _as_modulus(m):
    if isinstance(m, EllipticModulus):
        return m
    return EllipticModulus(float(m))


def _agm_KE(k, kp):
    """K and E from the AGM of (1, kp); c_0 = k."""
    a, b = 1.0, kp
    c = k
    acc = 0.5 * c * c
    weight = 0.5
    for _ in range(64):
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        weight *= 2.0
        acc += weight * c * c
        # the next c is of order c**2 / a, below rounding once c < 1e-9 a
        if abs(c) <= 1e-9 * a:
            break
    else:  # pragma: no cover - quadratic convergence makes this unreachable
        raise ConvergenceError("AGM iteration did not converge", estimate=a)
    K = math.pi / (2.0 * a)
    return K, K * (1.0 - acc)


def elliptic_KE(m):
    """Return ``(K(sigma), E(sigma))`` in one AGM pass; requires sigma < 1."""
    m = _as_modulus(m)
    if m.sigma_c == 0.0:
        raise DomainError("K(sigma) diverges at sigma = 1")
    return _agm_KE(m.sigma, m.sigma_c)


def elliptic_K(m):
    """Complete elliptic integral of the first kind.

    ``K(sigma) = int_0^{pi/2} (1 - sigma^2 sin^2 phi)^{-1/2} dphi``,
    computed as ``pi / (2 AGM(1, sqrt(1 - sigma^2)))``.

    Raises
    ------
    DomainError
        If ``sigma`` is outside ``[0, 1)``.
    """
    return elliptic_KE(m)[0]


def elliptic_E(m):
    """Complete elliptic integral of the second kind, ``0 <= sigma <= 1``."""
    m = _as_modulus(m)
    if m.sigma_c == 0.0:
        return 1.0
    return _agm_KE(m.sigma, m.sigma_c)[1]


def elliptic_Kprime(m):
    """``K'(sigma) = K(sqrt(1 - sigma^2))``; diverges at ``sigma = 0``."""
    m = _as_modulus(m)
    if m.sigma == 0.0:
        raise DomainError("K'(sigma) diverges at sigma = 0")
    return _agm_KE(m.sigma_c, m.sigma)[0]


# ---------------------------------------------------------------------------
# Jacobi theta_3
# ---------------------------------------------------------------------------

_THETA_RTOL = 1e-16
_TWO_PI_I = 2j * math.pi


def _theta_series(z, tau, max_order):
    """Partial sums of sum_m (2 pi i m)^p exp(2 pi i m z + pi i tau m^2).

    Terms are added in pairs moving away from the dominant index; a
    series stops once both new terms fall below ``1e-16`` times the
    partial sum (the absolute sum for derivative series, whose partial
    sums can cancel exactly). Beyond that point consecutive terms shrink
    at least by ``exp(-pi Im(tau))``, so the neglected tail is bounded by
    a geometric series.
    """
    z = complex(z)
    tau = complex(tau)
    v = tau.imag
    if not v > 0.0:
        raise DomainError(f"theta3 requires Im(tau) > 0, got tau = {tau!r}")
    m0 = int(round(-z.imag / v))

    def term(m):
        return np.exp(_TWO_PI_I * m * z + 1j * math.pi * tau * m * m)

    sums = [0j] * (max_order + 1)
    scale = [0.0] * (max_order + 1)
    t0 = term(m0)
    for p in range(max_order + 1):
        w = t0 * (_TWO_PI_I * m0) ** p
        sums[p] += w
        scale[p] += abs(w)
    k = 1
    while True:
        done = True
        for m in (m0 + k, m0 - k):
            t = term(m)
            for p in range(max_order + 1):
                w = t * (_TWO_PI_I * m) ** p
                sums[p] += w
                scale[p] += abs(w)
                ref = abs(sums[p]) if p == 0 else scale[p]
                if abs(w) > _THETA_RTOL * ref and abs(w) > 1e-300:
                    done = False
        if done:
            return sums
        k += 1


def _real_result(z, tau, value):
    if np.isrealobj(z) and complex(tau).real == 0.0:
        return float(value.real)
    return complex(value)


def _vectorize(func):
    def wrapper(z, tau, *args):
        if isinstance(z, np.ndarray):
            out = [func(zi, tau, *args) for zi in z.ravel()]
            return np.asarray(out).reshape(z.shape)
        return func(z, tau, *args)

    wrapper.__name__ = func.__name__
    wrapper.__doc__ = func.__doc__
    return wrapper


@_vectorize
def theta3(z, tau):
    r"""Third Jacobi theta function.

    .. math:: \theta(z;\tau) = \sum_{m=-\infty}^{\infty} e^{2\pi i m z + \pi i \tau m^2}

    Parameters
    ----------
    z : float or complex (or ndarray thereof)
    tau : complex
        Lattice parameter with ``Im(tau) > 0``.

    Returns
    -------
    float or complex
        Real for real ``z`` and purely imaginary ``tau``.
    """
    return _real_result(z, tau, _theta_series(z, tau, 0)[0])


@_vectorize
def theta3_derivs(z, tau, order):
    """``order``-th z-derivative of :func:`theta3` (``order`` in 0, 1, 2)."""
    if order not in (0, 1, 2):
        raise DomainError("theta3_derivs supports order 0, 1 or 2")
    return _real_result(z, tau, _theta_series(z, tau, order)[order])


def theta3_with_derivs(z, tau):
    """Return ``(theta, theta', theta'')`` at a scalar ``z`` in one pass."""
    sums = _theta_series(z, tau, 2)
    return tuple(_real_result(z, tau, s) for s in sums)


@_vectorize
def log_theta3_dd(z, tau):
    """Second z-derivative of ``log theta3``: theta''/theta - (theta'/theta)^2."""
    th, d1, d2 = _theta_series(z, tau, 2)
    r = d1 / th
    return _real_result(z, tau, d2 / th - r * r)


# ---------------------------------------------------------------------------
# Airy function
# ---------------------------------------------------------------------------

_AI0 = 0.3550280538878172392600632     # 3^(-2/3) / Gamma(2/3)
_AIP0 = -0.2588194037928067984051836   # -3^(-1/3) / Gamma(1/3)


def _airy_taylor(x0, a0, a1, h):
    """Advance (Ai, Ai') from x0 to x0 + h with the Taylor series of y'' = x y."""
    coef = [a0, a1, 0.5 * x0 * a0]
    val = a0 + a1 * h + coef[2] * h * h
    der = a1 + 2.0 * coef[2] * h
    hp = h * h  # h^(n-1) for n = 3 below
    quiet = 0
    n = 1
    while n < 400:
        n += 1
        # coefficient index n + 1
        c = (x0 * coef[n - 1] + coef[n - 2]) / ((n + 1) * n)
        coef.append(c)
        dterm = (n + 1) * c * hp
        hp *= h
        vterm = c * hp
        val += vterm
        der += dterm
        if abs(vterm) <= 1e-18 * (abs(val) + 1e-300) and abs(dterm) <= 1e-18 * (abs(der) + 1e-300):
            quiet += 1
            if quiet >= 3:
                break
        else:
            quiet = 0
    return val, der


@lru_cache(maxsize=1)
def _negative_anchors():
    """(Ai, Ai') on x = 0, -0.5, ..., -8 by Taylor stepping from the origin.

    Stepping toward negative x is stable: both Airy solutions oscillate
    there, so no growing mode amplifies the rounding errors.
    """
    anchors = {0: (_AI0, _AIP0)}
    a, d = _AI0, _AIP0
    for j in range(1, 17):
        a, d = _airy_taylor(-0.5 * (j - 1), a, d, -0.5)
        anchors[j] = (a, d)
    return anchors


def _airy_u(kmax):
    u = [1.0]
    for k in range(1, kmax + 1):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k))
    return u


_U = _airy_u(60)


def _airy_asym_pos(x, derivative=False):
    # Ai ~ e^-zeta / (2 sqrt(pi) x^(1/4)) sum (-1)^k u_k zeta^-k, and
    # Ai' ~ -x^(1/4) e^-zeta / (2 sqrt(pi)) sum (-1)^k v_k zeta^-k
    zeta = 2.0 / 3.0 * x ** 1.5
    total, prev = 0.0, math.inf
    for k, uk in enumerate(_U):
        if derivative:
            uk = uk * (6 * k + 1) / (1 - 6 * k)
        term = abs(uk) / zeta ** k
        if term > prev or term < 1e-17 * abs(total):
            break
        total += -uk / zeta ** k if k % 2 else uk / zeta ** k
        prev = term
    scale = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    if derivative:
        return -scale * x ** 0.25 * total
    return scale / x ** 0.25 * total


_POS_ANCHOR = 12.0


@lru_cache(maxsize=1)
def _positive_anchors():
    """(Ai, Ai') on x = 12, 11.5, ..., 0 by Taylor stepping down from x = 12.

    Going toward smaller x the dominant solution Bi shrinks relative to
    Ai, so errors of the asymptotic start values are not amplified.
    """
    n = int(2 * _POS_ANCHOR)
    a, d = _airy_asym_pos(_POS_ANCHOR), _airy_asym_pos(_POS_ANCHOR, derivative=True)
    anchors = {n: (a, d)}
    for j in range(n - 1, -1, -1):
        a, d = _airy_taylor(0.5 * (j + 1), a, d, -0.5)
        anchors[j] = (a, d)
    return anchors


def _airy_asym_neg(x):
    # x < 0; expansion in zeta = (2/3)|x|^{3/2}
    ax = -x
    zeta = 2.0 / 3.0 * ax ** 1.5
    even = odd = 0.0
    prev = math.inf
    for k, uk in enumerate(_U):
        term = uk / zeta ** k
        if term > prev or term < 1e-17:
            break
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2:
            odd += sign * term
        else:
            even += sign * term
        prev = term
    phase = zeta - 0.25 * math.pi
    return (math.cos(phase) * even + math.sin(phase) * odd) / (math.sqrt(math.pi) * ax ** 0.25)


def _airy_scalar(x):
    x = float(x)
    if x >= _POS_ANCHOR:
        return _airy_asym_pos(x)
    if x >= 0.0:
        j = int(round(2.0 * x))
        a, d = _positive_anchors()[j]
        return _airy_taylor(0.5 * j, a, d, x - 0.5 * j)[0]
    if x > -8.0:
        j = int(round(-2.0 * x))
        a, d = _negative_anchors()[j]
        return _airy_taylor(-0.5 * j, a, d, x + 0.5 * j)[0]
    return _airy_asym_neg(x)


def airy(x):
    """Airy function ``Ai(x)`` for real ``x`` (scalar or array).

    Optimally truncated asymptotic expansions for ``x >= 12`` and
    ``x <= -8``; in between, Taylor steps from anchors every 0.5, which are
    generated by stepping down from ``x = 12`` and down from ``x = 0``.
    Relative accuracy is about 1e-13 away from the zeros.
    """
    if np.ndim(x):
        xs = np.asarray(x, dtype=float)
        return np.array([_airy_scalar(v) for v in xs.ravel()]).reshape(xs.shape)
    return _airy_scalar(x)


# ---------------------------------------------------------------------------
# adaptive quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and endpoint information for :func:`integrate`.

    ``endpoint_exponents = (p_a, p_b)`` declares that the integrand behaves
    like ``(x - a)**p_a`` near ``a`` and ``(b - x)**p_b`` near ``b``.
    Half-integer exponents trigger the square-root substitution.
    """

    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_subdivisions: int = 400
    endpoint_exponents: tuple = (0.0, 0.0)

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        for p in self.endpoint_exponents:
            if not p > -1.0:
                raise DomainError(f"endpoint exponent {p} is not integrable")

    def with_exponents(self, pa, pb):
        return QuadratureSpec(self.rel_tol, self.abs_tol, self.max_subdivisions, (pa, pb))

    def tightened(self, factor):
        return QuadratureSpec(self.rel_tol / factor, self.abs_tol / factor,
                              self.max_subdivisions, self.endpoint_exponents)


_X_LO, _W_LO = np.polynomial.legendre.leggauss(10)
_X_HI, _W_HI = np.polynomial.legendre.leggauss(20)


def _panel(f, lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    f_hi = f(mid + half * _X_HI)
    f_lo = f(mid + half * _X_LO)
    i_hi = half * np.dot(_W_HI, f_hi)
    i_lo = half * np.dot(_W_LO, f_lo)
    return i_hi, abs(i_hi - i_lo), abs(half) * np.dot(_W_HI, np.abs(f_hi))


def _adaptive(f, lo, hi, rel_tol, abs_tol, max_sub):
    value, err, mag = _panel(f, lo, hi)
    count = 0
    heap = [(-err, count, lo, hi, value, err, mag)]
    total, total_err, total_mag = value, err, mag
    while True:
        floor = 50.0 * _EPS * total_mag
        if total_err <= max(abs_tol, rel_tol * abs(total), floor):
            return total, total_err
        if len(heap) >= max_sub:
            raise ConvergenceError(
                f"quadrature did not converge in {max_sub} subdivisions",
                estimate=total, error=total_err)
        _, _, a, b, v, e, g = heapq.heappop(heap)
        m = 0.5 * (a + b)
        total -= v
        total_err -= e
        total_mag -= g
        for a2, b2 in ((a, m), (m, b)):
            v2, e2, g2 = _panel(f, a2, b2)
            count += 1
            heapq.heappush(heap, (-e2, count, a2, b2, v2, e2, g2))
            total += v2
            total_err += e2
            total_mag += g2


def _half_integer(p):
    return abs(2.0 * p - round(2.0 * p)) < 1e-12 and int(round(2.0 * p)) % 2 != 0


def integrate(f, a, b, spec=None):
    """Integrate a vectorised function ``f`` over ``[a, b]``.

    Adaptive bisection with a 20-point Gauss-Legendre rule and the
    embedded 10-point rule as error estimate. When an endpoint exponent is
    a half-integer, the half-interval next to it is mapped by
    ``x = a + (mid - a) u**2`` (mirrored at ``b``), which turns
    ``(x - a)**(k/2)`` behaviour into a smooth integrand in ``u``.

    Parameters
    ----------
    f : callable
        Accepts and returns ndarrays (real or complex).
    a, b : float
    spec : QuadratureSpec, optional

    Returns
    -------
    value, abserr : tuple
        Integral estimate and its absolute error estimate.

    Raises
    ------
    ConvergenceError
        If ``spec.max_subdivisions`` panels do not reach the tolerance;
        ``.estimate`` carries the best value.
    """
    spec = QuadratureSpec() if spec is None else spec
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0, 0.0
    if a > b:
        pa, pb = spec.endpoint_exponents
        v, e = integrate(f, b, a, spec.with_exponents(pb, pa))
        return -v, e
    pa, pb = spec.endpoint_exponents
    sub_a, sub_b = _half_integer(pa), _half_integer(pb)
    if not (sub_a or sub_b):
        return _adaptive(f, a, b, spec.rel_tol, spec.abs_tol, spec.max_subdivisions)

    mid = 0.5 * (a + b)
    abs_tol = 0.5 * spec.abs_tol
    pieces = []
    if sub_a:
        la = mid - a
        pieces.append(lambda u: f(a + la * u * u) * (2.0 * la * u))
    else:
        pieces.append((f, a, mid))
    if sub_b:
        lb = b - mid
        pieces.append(lambda u: f(b - lb * u * u) * (2.0 * lb * u))
    else:
        pieces.append((f, mid, b))
    value, err = 0.0, 0.0
    for piece in pieces:
        if isinstance(piece, tuple):
            g, lo, hi = piece
        else:
            g, lo, hi = piece, 0.0, 1.0
        v, e = _adaptive(g, lo, hi, spec.rel_tol, abs_tol, spec.max_subdivisions)
        value += v
        err += e
    return value, err
