"""Oscillatory (genus-one) regime.

Given the branch points ``beta3 < alpha < beta2 < beta1`` at some ``s``,
this module derives the elliptic data (modulus, lattice parameter, period
``C`` and phase speed ``Omega``), evaluates the genus-one g-function, the
normalised Abel map ``u`` and the theta-function quotients ``h``,
``hhat``, and finally ``y`` in two algebraically equivalent forms that are
cross-checked on every call.

Branch conventions: ``R(z) = (z-b3)^(1/2) (z-b2)^(1/2) (z-b1)^(1/2)`` is
the product of principal roots, analytic off ``(-inf, b3] U [b2, b1]``.
Real points on a cut are addressed with ``side='+'`` (limit from the
upper half plane) or ``side='-'``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import S_LEFT, S_RIGHT, ExpansionResult, Regime, ScalePoint
from .errors import (
    BranchCutError,
    DegeneracyError,
    DomainError,
    InternalConsistencyError,
    PoleError,
    RegimeError,
)
from .modulation import ModulationPoint, solve_modulation
from .specfn import (
    EllipticModulus,
    QuadratureSpec,
    elliptic_KE,
    elliptic_Kprime,
    integrate,
    theta3,
    theta3_with_derivs,
)

__all__ = [
    "EllipticData",
    "derive_elliptic",
    "g_elliptic",
    "g_elliptic_coeffs",
    "abel_u",
    "theta_shift",
    "h_functions",
    "h1_h2",
    "y_elliptic_forms",
    "y_elliptic",
]

CONFLUENCE_GUARD = 1e-6
POLE_RADIUS = 1e-6
FORM_TOL = 1e-8
_SPEC = QuadratureSpec(rel_tol=1e-13, abs_tol=1e-15, max_subdivisions=600)


@dataclass(frozen=True)
class EllipticData:
    """Derived genus-one quantities for a modulation point.

    ``tau`` is purely imaginary; ``C_integral`` is the period integral
    used to cross-check ``C = 2 K / sqrt(beta1 - beta3)``.
    """

    m: ModulationPoint
    sigma: float
    sigma_c: float
    K: float
    E: float
    Kprime: float
    C: float
    tau: complex
    Omega: float
    C_integral: float


def _check_point(m):
    b3, b2, b1 = m.beta3, m.beta2, m.beta1
    L = b1 - b3
    if not L > 0.0:
        raise DegeneracyError("branch points collapse to a single point")
    if b2 - b3 < CONFLUENCE_GUARD * L:
        raise DegeneracyError("beta3 and beta2 merge: use the Painleve II edge formula")
    if b1 - b2 < CONFLUENCE_GUARD * L:
        raise DegeneracyError("beta2 and beta1 merge: use the soliton edge formula")
    return b3, b2, b1, L


def derive_elliptic(m, spec=None):
    """Elliptic data for an interior :class:`ModulationPoint`.

    Raises
    ------
    DegeneracyError
        Two branch points closer than ``1e-6 (beta1 - beta3)``.
    InternalConsistencyError
        The closed-form ``C`` disagrees with its period integral.
    """
    spec = _SPEC if spec is None else spec
    b3, b2, b1, L = _check_point(m)
    a = m.alpha
    mod = EllipticModulus(math.sqrt((b2 - b3) / L), math.sqrt((b1 - b2) / L))
    K, E = elliptic_KE(mod)
    Kp = elliptic_Kprime(mod)
    C = 2.0 * K / math.sqrt(L)

    def omega_f(x):
        return (np.sqrt(np.maximum(x - b3, 0.0)) * (x - a) * np.sqrt(np.maximum(x - b2, 0.0))
                * np.sqrt(np.maximum(b1 - x, 0.0)))

    Omega = integrate(omega_f, b2, b1, spec.with_exponents(0.5, 0.5))[0] / 15.0

    C_int = _period_integral(b3, b2, b1, spec)
    if abs(C_int - C) > 1e-9 * C:
        raise InternalConsistencyError(f"period integral {C_int!r} != 2K/sqrt(b1-b3) = {C!r}")
    return EllipticData(m, mod.sigma, mod.sigma_c, K, E, Kp, C, 1j * Kp / K, Omega, C_int)


def _period_integral(b3, b2, b1, spec):
    """``int_{b3}^{b2} dx / sqrt((x-b3)(b2-x)(b1-x))``.

    Each half of the band is parametrised from its own endpoint so the
    vanishing factor is ``u * half`` exactly rather than a difference of
    nearly equal numbers.
    """
    half = 0.5 * (b2 - b3)
    lo_spec = spec.with_exponents(-0.5, 0.0)

    def from_b3(u):
        d = u * half
        return half / np.sqrt(d * (b2 - b3 - d) * (b1 - b3 - d))

    def from_b2(u):
        d = u * half
        return half / np.sqrt(d * (b2 - b3 - d) * (b1 - b2 + d))

    return integrate(from_b3, 0.0, 1.0, lo_spec)[0] + integrate(from_b2, 0.0, 1.0, lo_spec)[0]


# ---------------------------------------------------------------------------
# contour integrals of algebraic functions on the genus-one curve
# ---------------------------------------------------------------------------
#
# Every contour piece is parametrised as z = origin + u * direction with
# u in [0, 1] and any branch-point singularity at u = 0. The differences
# z - beta_k are formed as (origin - beta_k) + u * direction, which is
# exact at u -> 0 when the origin is a branch point; forming z first and
# subtracting afterwards would lose all relative accuracy there.

def _boundary(x, side):
    """Real values as complex numbers carrying a signed-zero imaginary part."""
    z = np.empty(np.shape(x), dtype=complex)
    z.real = x
    z.imag = 0.0 if side == "+" else -0.0
    return z


def _piece(integrand, m, origin, direction, spec, side=None, exponent=0.0):
    """``int integrand(z, R(z)) dz`` over ``origin + [0, 1] * direction``.

    With ``side`` given, ``origin`` and ``direction`` are real and the
    boundary value of ``R`` on that side of the real axis is used.
    """
    offs = [origin - b for b in (m.beta3, m.beta2, m.beta1)]

    def f(u):
        if side is None:
            R = np.ones(np.shape(u), dtype=complex)
            for o in offs:
                R = R * np.sqrt(o + u * direction + 0j)
        else:
            R = np.ones(np.shape(u), dtype=complex)
            for o in offs:
                R = R * np.sqrt(_boundary(o + u * direction, side))
        return integrand(origin + u * direction, R) * direction

    return integrate(f, 0.0, 1.0, spec.with_exponents(exponent, 0.0))[0]


def _real_path(integrand, m, start, end, side, spec, exponent):
    """Integrate along the real axis from ``start`` down to ``end < start``.

    Boundary values are taken on ``side``. Around every branch point
    strictly between ``end`` and ``start`` the path makes a semicircular
    detour of radius ``rho = min(1e-3 (beta1 - beta3), gap / 4)`` in the
    half plane of ``side``. ``exponent`` is the integrand's power-law
    behaviour at a branch point that is also a path end.
    """
    points = (m.beta3, m.beta2, m.beta1)
    interior = sorted((p for p in points if end < p < start), reverse=True)
    nodes = [start] + interior + [end]
    rho = 0.0
    if interior:
        gaps = np.abs(np.diff(nodes))
        rho = min(1e-3 * (m.beta1 - m.beta3), 0.25 * float(np.min(gaps)))
    sgn = 1.0 if side == "+" else -1.0
    total = 0j
    for k in range(len(nodes) - 1):
        hi, lo = nodes[k], nodes[k + 1]
        hi_eff = hi - rho if k > 0 else hi
        lo_eff = lo + rho if k < len(nodes) - 2 else lo
        ea = exponent if (k == 0 and hi in points) else 0.0
        eb = exponent if (k == len(nodes) - 2 and lo in points) else 0.0
        half = 0.5 * (hi_eff - lo_eff)
        # upper half from hi_eff downward, lower half from lo_eff upward
        total += _piece(integrand, m, hi_eff, -half, spec, side, ea)
        total -= _piece(integrand, m, lo_eff, half, spec, side, eb)
        if k < len(nodes) - 2:
            c = lo

            def arc(phi, c=c):
                e = np.exp(1j * sgn * phi)
                offs = [c - b for b in points]
                R = np.ones(np.shape(phi), dtype=complex)
                for o in offs:
                    R = R * np.sqrt(o + rho * e)
                return integrand(c + rho * e, R) * (1j * sgn * rho * e)

            total += integrate(arc, 0.0, math.pi, spec.with_exponents(0.0, 0.0))[0]
    return total


def _check_side(side):
    if side not in (None, "+", "-"):
        raise DomainError(f"side must be None, '+' or '-', got {side!r}")


def _on_real_cut(zeta, b1):
    z = complex(zeta)
    return z.imag == 0.0 and z.real < b1


def g_elliptic(zeta, m, side=None, spec=None):
    """Genus-one g-function ``(1/30) int_{b1}^{zeta} (z-alpha) R(z) dz``.

    Off the real axis (and for real ``zeta > beta1``) the contour is the
    straight segment from ``beta1``. For real ``zeta < beta1`` a ``side``
    must be given; the contour then runs along that side of the real axis
    with small semicircles around intermediate branch points.

    Raises
    ------
    BranchCutError
        Real ``zeta < beta1`` without ``side``.
    """
    _check_side(side)
    spec = _SPEC if spec is None else spec
    a = m.alpha
    z = complex(zeta)

    def integrand(w, R):
        return (w - a) * R / 30.0

    if z == m.beta1:
        return 0j
    if _on_real_cut(z, m.beta1):
        if side is None:
            raise BranchCutError("zeta on (-inf, beta1] requires side='+' or '-'")
        return _real_path(integrand, m, m.beta1, z.real, side, spec, 0.5)
    return _piece(integrand, m, m.beta1, z - m.beta1, spec, None, 0.5)


def g_elliptic_coeffs(m):
    """Coefficients ``(c1, c2)`` of ``zeta**(3/2)`` and ``zeta**(1/2)`` at infinity."""
    b = (m.beta3, m.beta2, m.beta1)
    S = sum(b)
    c1 = -(S * S + 2.0 * sum(x * x for x in b)) / 360.0
    c2 = (S ** 3 - 4.0 * sum(x ** 3 for x in b)) / 360.0
    return c1, c2


def _inv_R(w, R):
    return 1.0 / R


def abel_u(zeta, d, side=None, spec=None):
    """Normalised Abel map ``u = (1/(2C)) int_inf^zeta dz / R(z)``.

    The improper end is compactified with ``z = zeta + L v (2 - v) / (1 - v)**2``
    (``v`` in ``[0, 1)``), i.e. the horizontal ray to the right of
    ``zeta``. Real ``zeta < beta1`` needs ``side``; the value is then
    ``u(beta1)`` plus a boundary-value integral along the real axis.

    Parameters
    ----------
    d : EllipticData
    """
    _check_side(side)
    spec = _SPEC if spec is None else spec
    m = d.m
    z = complex(zeta)
    if _on_real_cut(z, m.beta1):
        if side is None:
            raise BranchCutError("zeta on (-inf, beta1) requires side='+' or '-'")
        base = _ray_integral(m, complex(m.beta1), spec, singular_start=True)
        rest = _real_path(_inv_R, m, m.beta1, z.real, side, spec, -0.5)
        return (base + rest) / (2.0 * d.C)
    return _ray_integral(m, z, spec, singular_start=(z == m.beta1)) / (2.0 * d.C)


def _ray_integral(m, z, spec, singular_start=False):
    """``int_inf^z dz / R`` along the ray ``z + [0, inf)``."""
    L = max(1.0, abs(z), m.beta1 - m.beta3)
    offs = [z - b for b in (m.beta3, m.beta2, m.beta1)]

    def f(v):
        v = np.asarray(v, dtype=float)
        out = np.zeros(v.shape, dtype=complex)
        ok = v < 1.0
        vv = v[ok]
        q = 1.0 - vv
        shift = L * vv * (2.0 - vv) / (q * q)
        R = np.ones(vv.shape, dtype=complex)
        for o in offs:
            R = R * np.sqrt(o + shift + 0j)
        out[ok] = -2.0 * L / (q * q * q) / R
        return out

    return integrate(f, 0.0, 1.0, spec.with_exponents(-0.5 if singular_start else 0.0, 0.0))[0]


def theta_shift(d, t):
    """``c = t**(7/4) Omega / (2 pi)`` reduced to ``[0, 1)``.

    The product is split into an exactly representable head and a tail
    (Dekker two-product) before the integer part is removed, so large
    ``t`` keeps the fractional part accurate to a few ulps of ``c``.
    """
    if not t > 0.0:
        raise DomainError("t must be positive in the elliptic regime")
    a = t ** 1.75
    b = d.Omega / (2.0 * math.pi)
    hi = a * b
    lo = math.fma(a, b, -hi) if hasattr(math, "fma") else _two_prod_err(a, b, hi)
    frac_hi = hi - math.floor(hi)
    c = frac_hi + lo
    return c - math.floor(c)


def _two_prod_err(a, b, p):
    split = 134217729.0
    ca = split * a
    ah = ca - (ca - a)
    al = a - ah
    cb = split * b
    bh = cb - (cb - b)
    bl = b - bh
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


def h_functions(zeta, d, t, side=None, c=None):
    """Theta quotients ``h`` and ``hhat`` at ``zeta``.

    ``h = theta(0)/theta(c) * theta(u + c)/theta(u)`` and
    ``hhat = theta(0)/theta(c) * theta(c - u)/theta(u)`` with
    ``c = t**(7/4) Omega / (2 pi)`` (or the explicitly supplied ``c``).

    Raises
    ------
    PoleError
        ``zeta`` within ``1e-6`` of ``beta2``, where ``theta(u)`` vanishes.
    """
    if abs(complex(zeta) - d.m.beta2) < POLE_RADIUS:
        raise PoleError("theta(u(zeta)) vanishes at zeta = beta2")
    c = theta_shift(d, t) if c is None else c
    u = abel_u(zeta, d, side)
    tau = d.tau
    pref = theta3(0.0, tau) / theta3(c, tau)
    den = theta3(u, tau)
    h = pref * theta3(u + c, tau) / den
    hh = pref * theta3(c - u, tau) / den
    return complex(h), complex(hh)


def h1_h2(d, t, c=None):
    """Expansion constants of ``h = 1 + h1 zeta**(-1/2) + h2 / zeta + ...``.

    Uses ``theta'(0) = 0``: ``h1 = -theta'(c)/(C theta(c))`` and
    ``h2 = (theta''(c)/theta(c) - theta''(0)/theta(0)) / (2 C**2)``.
    """
    c = theta_shift(d, t) if c is None else c
    th_c, d1_c, d2_c = theta3_with_derivs(c, d.tau)
    th_0, _, d2_0 = theta3_with_derivs(0.0, d.tau)
    h1 = -d1_c / (d.C * th_c)
    h2 = (d2_c / th_c - d2_0 / th_0) / (2.0 * d.C ** 2)
    return h1, h2


@dataclass(frozen=True)
class EllipticForms:
    form_a: float
    form_b: float
    mean_part: float
    theta_part: float
    c: float

    @property
    def relative_gap(self):
        return abs(self.form_a - self.form_b) / max(abs(self.form_a), abs(self.form_b), 1.0)


def y_elliptic_forms(d, t, c=None):
    """Both representations of ``y / t**(1/2)`` at frozen elliptic data.

    (A) ``(b3 + b2 - b1)/2 + (b1 - b3) E/K + C**-2 (log theta)''(c)``
    (B) ``(b3 - b2 + b1)/2 + 2 h2 - h1**2``
    """
    m = d.m
    c = theta_shift(d, t) if c is None else c
    th, d1, d2 = theta3_with_derivs(c, d.tau)
    ldd = d2 / th - (d1 / th) ** 2
    mean = 0.5 * (m.beta3 + m.beta2 - m.beta1) + (m.beta1 - m.beta3) * d.E / d.K
    theta_part = ldd / d.C ** 2
    h1, h2 = h1_h2(d, t, c)
    form_b = 0.5 * (m.beta3 - m.beta2 + m.beta1) + 2.0 * h2 - h1 * h1
    return EllipticForms(mean + theta_part, form_b, mean, theta_part, c)


def y_elliptic(p, m=None, data=None):
    """Oscillatory-regime ``y`` at a point with ``t > 0``.

    The value is ``t**(1/2)`` times form (A) of :func:`y_elliptic_forms`;
    form (B) is evaluated as an independent check.

    Parameters
    ----------
    p : ScalePoint
        ``t > 0`` and ``S_LEFT < s < S_RIGHT``.
    m, data : optional
        Precomputed modulation point / elliptic data for ``p.s``.

    Raises
    ------
    RegimeError
        ``t <= 0`` or ``s`` outside the open interval.
    DegeneracyError
        ``s`` so close to an endpoint that two branch points merge.
    InternalConsistencyError
        Forms (A) and (B) differ by more than ``1e-8`` relative to
        ``max(|A|, |B|, 1)`` (in units of ``t**(1/2)``).
    """
    if not isinstance(p, ScalePoint):
        raise DomainError("y_elliptic expects a ScalePoint")
    if p.t <= 0.0 or not (S_LEFT < p.s < S_RIGHT):
        raise RegimeError(f"(s, t) = ({p.s}, {p.t}) is not in the elliptic region")
    if data is None:
        m = solve_modulation(p.s) if m is None else m
        data = derive_elliptic(m)
    forms = y_elliptic_forms(data, p.t)
    gap = forms.relative_gap
    if not gap <= FORM_TOL:
        raise InternalConsistencyError(
            f"elliptic forms disagree: A = {forms.form_a!r}, B = {forms.form_b!r}")
    rt = math.sqrt(p.t)
    details = {
        "form_b": forms.form_b * rt,
        "form_gap": gap,
        "c": forms.c,
        "sigma": data.sigma,
        "Omega": data.Omega,
    }
    return ExpansionResult(forms.mean_part * rt, forms.theta_part * rt, "t^-1/2",
                           Regime.ELLIPTIC, details)
