"""Algebraic (non-oscillatory) regime.

Outside the oscillatory wedge the solution behaves like
``y ~ (z0/2)|t|^(1/2)`` where ``z0(s)`` solves the cubic
``z0**3 - 24 sgn(t) z0 + 48 s = 0``. This module supplies that root, the
associated g-function with its sign properties, the large-zeta phase and
the leading-order evaluation of ``y``.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .core import S_LEFT, S_RIGHT, ExpansionResult, Regime, ScalePoint
from .errors import BranchCutError, ConvergenceError, DomainError, RegimeError

__all__ = [
    "AlgebraicG",
    "PropositionReport",
    "solve_z0",
    "algebraic_g",
    "g_algebraic",
    "g_algebraic_prime",
    "phase_theta",
    "check_proposition_g",
    "y_algebraic",
]

_TWO_SQRT2 = 2.0 * math.sqrt(2.0)


def _sign(sign_t):
    if sign_t not in (1, -1):
        raise DomainError(f"sign_t must be +1 or -1, got {sign_t!r}")
    return sign_t


def _admissible(s, sign_t):
    return sign_t < 0 or not (S_LEFT < s < S_RIGHT)


def _cubic(z, s, sign_t):
    return z ** 3 - 24.0 * sign_t * z + 48.0 * s


def solve_z0(s, sign_t):
    """Real root of ``z**3 - 24 sign_t z + 48 s = 0`` selected by the regime.

    For ``sign_t = -1`` the cubic is increasing and the root is unique.
    For ``sign_t = +1`` and ``s`` outside ``(S_LEFT, S_RIGHT)`` the root
    on the outer monotone branch is used: ``z0 >= 4 sqrt(3)`` when
    ``s <= S_LEFT`` and ``z0 <= -4 sqrt(15)/3`` when ``s >= S_RIGHT``.
    (For ``S_RIGHT <= s < 2 sqrt(2)/3`` the cubic has two further real
    roots in ``(-2 sqrt 2, inf)``; they are not continuous with the
    large-``s`` solution and are never returned.)

    Raises
    ------
    RegimeError
        ``sign_t = +1`` and ``S_LEFT < s < S_RIGHT``.
    """
    sign_t = _sign(sign_t)
    s = float(s)
    if not math.isfinite(s):
        raise DomainError("s must be finite")
    if not _admissible(s, sign_t):
        raise RegimeError(f"s = {s} lies inside the oscillatory interval for t > 0")
    bound = 1.0 + max(24.0, 48.0 * abs(s))
    if sign_t < 0:
        lo, hi = -bound, bound
    elif s <= S_LEFT:
        lo, hi = _TWO_SQRT2, bound
    else:
        lo, hi = -bound, -_TWO_SQRT2
    # exact endpoint roots
    if sign_t > 0 and s == S_LEFT:
        return 4.0 * math.sqrt(3.0)
    if sign_t > 0 and s == S_RIGHT:
        return -4.0 * math.sqrt(15.0) / 3.0
    return _safeguarded_newton(lambda z: _cubic(z, s, sign_t),
                               lambda z: 3.0 * z * z - 24.0 * sign_t, lo, hi)


def _safeguarded_newton(f, df, lo, hi, maxit=200):
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise ConvergenceError("root is not bracketed", estimate=0.5 * (lo + hi))
    if flo > 0.0:
        lo, hi = hi, lo  # keep f(lo) < 0 < f(hi)
    z = 0.5 * (lo + hi)
    for _ in range(maxit):
        fz = f(z)
        if fz == 0.0:
            return z
        if fz < 0.0:
            lo = z
        else:
            hi = z
        d = df(z)
        step = fz / d if d != 0.0 else math.inf
        znew = z - step
        if not (min(lo, hi) < znew < max(lo, hi)):
            znew = 0.5 * (lo + hi)
        if abs(znew - z) <= 4e-16 * max(1.0, abs(z)):
            return znew
        z = znew
    raise ConvergenceError("safeguarded Newton did not converge", estimate=z)


@dataclass(frozen=True)
class AlgebraicG:
    """Coefficients of the algebraic g-function.

    ``g(zeta) = c1 w**(7/2) + c2 w**(5/2) + c3 w**(3/2)`` with
    ``w = zeta - z0``. Fields may be floats or mpmath numbers; the
    coefficient properties preserve the number type of ``z0``.
    """

    z0: float
    sign_t: int
    s: float = None

    @property
    def c1(self):
        return (self.z0 * 0 + 1) / 105

    @property
    def c2(self):
        return self.z0 / 30

    @property
    def c3(self):
        return self.z0 * self.z0 / 24 - (self.z0 * 0 + self.sign_t) / 3

    def cubic_residual(self):
        s = self.s if self.s is not None else 0.0
        return _cubic(self.z0, s, self.sign_t)


def algebraic_g(s, sign_t):
    """Build :class:`AlgebraicG` for ``(s, sign_t)``."""
    return AlgebraicG(solve_z0(s, sign_t), sign_t, float(s))


def _is_real_number(z):
    if isinstance(z, complex):
        return z.imag == 0.0
    if hasattr(z, "imag") and not isinstance(z, (int, float)):
        try:
            return z.imag == 0
        except Exception:  # pragma: no cover
            return False
    return True


def _boundary_sqrt(w, side):
    """``w**(1/2)`` with principal cut; boundary value for ``w < 0``."""
    if _is_real_number(w):
        wr = w.real if hasattr(w, "real") else w
        if wr >= 0:
            return (wr * 1) ** 0.5 if wr != 0 else wr * 0
        if side is None:
            raise BranchCutError("point on the branch cut needs side='+' or '-'")
        root = (-wr) ** 0.5
        return 1j * root if side == "+" else -1j * root
    return w ** 0.5


def _check_side(side):
    if side not in (None, "+", "-"):
        raise DomainError(f"side must be None, '+' or '-', got {side!r}")


def g_algebraic(zeta, G, side=None):
    """Algebraic g-function with its cut on ``(-inf, z0]``.

    Parameters
    ----------
    zeta : real or complex
    G : AlgebraicG
    side : {None, '+', '-'}
        Boundary value from the upper (``'+'``) or lower (``'-'``) half
        plane, required for real ``zeta < z0``.

    Raises
    ------
    BranchCutError
        ``zeta`` is on the cut and no side was given.
    """
    _check_side(side)
    w = zeta - G.z0
    r = _boundary_sqrt(w, side)
    return r * w * ((G.c1 * w + G.c2) * w + G.c3)


def g_algebraic_prime(zeta, G, side=None):
    """``d g / d zeta`` with the same branch conventions as :func:`g_algebraic`."""
    _check_side(side)
    w = zeta - G.z0
    r = _boundary_sqrt(w, side)
    return r * ((3.5 * G.c1 * w + 2.5 * G.c2) * w + 1.5 * G.c3)


def phase_theta(zeta, x, t, side=None):
    """``zeta**(7/2)/105 - t zeta**(3/2)/3 + x zeta**(1/2)``, cut on ``(-inf, 0]``."""
    _check_side(side)
    r = _boundary_sqrt(zeta, side)
    return r * ((zeta * zeta / 105 - t / 3) * zeta + x)


@dataclass(frozen=True)
class PropositionReport:
    """Outcome of :func:`check_proposition_g`.

    ``g_violations`` and ``gprime_violations`` list ``(zeta, value)``
    pairs where the sign condition failed. ``disc1``/``disc2`` are the two
    discriminants; ``disc1_asserted``/``disc2_asserted`` say whether the
    sign argument relies on them being negative at this ``z0``.
    """

    z0: float
    sign_t: int
    radius: float
    n_points: int
    g_violations: tuple
    gprime_violations: tuple
    disc1: float
    disc2: float
    disc1_asserted: bool
    disc2_asserted: bool

    @property
    def discriminant_violations(self):
        bad = []
        if self.disc1_asserted and not self.disc1 < 0.0:
            bad.append(("c2^2-4c1c3", self.disc1))
        if self.disc2_asserted and not self.disc2 < 0.0:
            bad.append(("25/4c2^2-21c1c3", self.disc2))
        return tuple(bad)

    @property
    def ok(self):
        return not (self.g_violations or self.gprime_violations or self.discriminant_violations)

    def __bool__(self):
        return self.ok


def check_proposition_g(G, sign_t=None, radius=1e3, n_points=1000, min_offset=1e-6):
    """Scan the sign conditions ``g > 0`` on ``(z0, z0+R]`` and
    ``Im g'_+ > 0`` on ``[z0-R, z0)``.

    Offsets from ``z0`` are log-spaced in ``[min_offset, radius]``. Both
    quantities factor as a power of the offset times a quadratic in it, so
    the quadratic factor is what gets tested (this keeps the tiny-offset
    end free of underflow); the raw values are reported for violations.
    """
    sign_t = G.sign_t if sign_t is None else _sign(sign_t)
    if sign_t != G.sign_t:
        raise DomainError("sign_t disagrees with the AlgebraicG")
    if not _admissible(G.s if G.s is not None else math.inf, sign_t):
        raise RegimeError("parameters outside the algebraic domain")
    z0 = float(G.z0)
    c1, c2, c3 = float(G.c1), float(G.c2), float(G.c3)
    d = np.logspace(math.log10(min_offset), math.log10(radius), int(n_points))

    quad_g = (c1 * d + c2) * d + c3                 # g = d^{3/2} quad_g
    quad_gp = (3.5 * c1 * d - 2.5 * c2) * d + 1.5 * c3  # Im g'_+ = d^{1/2} quad_gp
    g_bad = tuple((z0 + di, di ** 1.5 * qi) for di, qi in zip(d, quad_g) if not qi > 0.0)
    gp_bad = tuple((z0 - di, di ** 0.5 * qi) for di, qi in zip(d, quad_gp) if not qi > 0.0)

    disc1 = c2 * c2 - 4.0 * c1 * c3
    disc2 = 6.25 * c2 * c2 - 21.0 * c1 * c3
    disc1_asserted = sign_t < 0 or abs(z0) > 4.0 * math.sqrt(5.0 / 3.0)
    disc2_asserted = sign_t < 0 or abs(z0) > 4.0 * math.sqrt(3.0)
    return PropositionReport(z0, sign_t, float(radius), int(n_points), g_bad, gp_bad,
                             disc1, disc2, disc1_asserted, disc2_asserted)


def y_algebraic(p):
    """Leading-order ``y`` in the algebraic regime.

    ``y = (z0(s)/2) |t|**(1/2) + O(|t|**-1)``. Admissible points are all
    ``t < 0`` and ``t > 0`` with ``s`` outside the open interval
    ``(S_LEFT, S_RIGHT)``; the interval endpoints are accepted so the
    boundary values can be compared with the edge formulas.

    Raises
    ------
    RegimeError
        ``t > 0`` and ``S_LEFT < s < S_RIGHT``.
    """
    if not isinstance(p, ScalePoint):
        raise DomainError("y_algebraic expects a ScalePoint")
    sign_t = p.sign_t
    if not _admissible(p.s, sign_t):
        raise RegimeError(f"s = {p.s} is in the oscillatory interval; use the elliptic formula")
    z0 = solve_z0(p.s, sign_t)
    regime = Regime.ALGEBRAIC_NEG_T if sign_t < 0 else Regime.ALGEBRAIC_POS_T
    lead = 0.5 * z0 * math.sqrt(abs(p.t))
    return ExpansionResult(lead, 0.0, "|t|^-1", regime, {"z0": z0})
