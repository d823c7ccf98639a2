"""Edge expansions at the two ends of the oscillatory interval.

Left edge (``s = -2 sqrt 3``): a Painleve II description built on the
Hastings-McLeod solution ``q'' = xi q + 2 q**3``, ``q ~ Ai(xi)`` as
``xi -> +inf`` and ``q ~ sqrt(-xi/2)`` as ``xi -> -inf``.

Right edge (``s = 2 sqrt(15)/27``): a train of ``sech**2`` pulses
centred near half-integer values of the edge variable.
"""

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.linalg import solve_banded

from .core import S_LEFT, S_RIGHT, ExpansionResult, Regime
from .errors import ConvergenceError, DomainError
from .specfn import airy

__all__ = [
    "C0",
    "C1",
    "C2",
    "GAMMA",
    "OMEGA0",
    "OMEGA1",
    "HMProfile",
    "SolitonEdgeParams",
    "solve_hastings_mcleod",
    "hastings_mcleod",
    "y_edge_pii",
    "y_edge_soliton",
    "soliton_X",
    "soliton_center",
    "soliton_sum_bound",
    "edge_constants_check",
    "xi_from_x_pii",
    "x_from_xi_pii",
    "xi_from_x_soliton",
    "x_from_xi_soliton",
]

# closed forms
C0 = 5.0 ** (1.0 / 3.0)
C1 = 5.0 ** (-1.0 / 6.0) * 3.0 ** (-0.25) / 2.0
C2 = math.sqrt(7.0) * 3.0 ** 0.75 / (8.0 * 5.0 ** 0.25)
GAMMA = 4.0 * math.sqrt(2.0) * 5.0 ** 0.375 * 7.0 ** 1.25 * 3.0 ** (-11.0 / 8.0)
OMEGA0 = 80.0 / 21.0 * math.sqrt(5.0) * 3.0 ** 0.75
OMEGA1 = 2.0 * 3.0 ** 0.25 * 5.0 ** (5.0 / 6.0)

# 25-digit decimal expansions (computed independently at 30 digits)
_REFERENCE = {
    "c0": 1.709975946676696989353109,
    "c1": 0.2905324791028052083134623,
    "c2": 0.5041473317343470113011704,
    "gamma": 26.00276706571602609946871,
    "omega0": 19.41764851253854309476333,
    "omega1": 10.06434030110003454833917,
    "s_left": -3.464101615137754587054893,
    "s_right": 0.2868876552746234729762419,
}

_SQ3 = math.sqrt(3.0)
_SQ15 = math.sqrt(15.0)
_TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# Hastings-McLeod profile
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HMProfile:
    """Tabulated Hastings-McLeod solution with C1 cubic Hermite interpolation.

    ``q`` and ``dq`` are nodal values of the solution and its derivative;
    between nodes the profile is the cubic Hermite interpolant.
    """

    grid: np.ndarray
    q: np.ndarray
    dq: np.ndarray
    refinements: tuple = field(default=(), compare=False)
    _spline: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if g.ndim != 1 or len(g) < 3 or np.any(np.diff(g) <= 0.0):
            raise DomainError("grid must be strictly increasing with at least 3 nodes")
        object.__setattr__(self, "_spline", CubicHermiteSpline(g, self.q, self.dq))

    @property
    def domain(self):
        return float(self.grid[0]), float(self.grid[-1])

    def __call__(self, xi):
        lo, hi = self.domain
        x = np.asarray(xi, dtype=float)
        if np.any(x < lo) or np.any(x > hi):
            raise DomainError(f"xi outside the profile domain [{lo}, {hi}]")
        out = self._spline(x)
        return float(out) if np.ndim(xi) == 0 else out

    def derivative(self, xi):
        out = self._spline.derivative()(np.asarray(xi, dtype=float))
        return float(out) if np.ndim(xi) == 0 else out

    def ode_residual(self):
        """Max of ``|q'' - xi q - 2 q**3|`` with fourth-order differences.

        Uses the five-point stencil on interior nodes of the (uniform) grid.
        """
        x, q = self.grid, self.q
        h = x[1] - x[0]
        d2 = (-q[4:] + 16.0 * q[3:-1] - 30.0 * q[2:-2] + 16.0 * q[1:-3] - q[:-4]) / (12.0 * h * h)
        xi = x[2:-2]
        return float(np.max(np.abs(d2 - xi * q[2:-2] - 2.0 * q[2:-2] ** 3)))

    def to_csv(self, dest=None):
        """CSV with header ``xi,q``; returns the text, optionally writing it."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("xi", "q"))
        for a, b in zip(self.grid, self.q):
            w.writerow((format(a, ".17g"), format(b, ".17g")))
        text = buf.getvalue()
        if dest is not None:
            if hasattr(dest, "write"):
                dest.write(text)
            else:
                with open(dest, "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
        return text

    @classmethod
    def from_csv(cls, src):
        """Inverse of :meth:`to_csv`; derivatives are rebuilt by differencing."""
        if hasattr(src, "read"):
            text = src.read()
        elif "\n" in str(src):
            text = str(src)
        else:
            with open(src, encoding="utf-8") as fh:
                text = fh.read()
        rows = list(csv.reader(io.StringIO(text)))
        if rows[0] != ["xi", "q"]:
            raise DomainError("expected header 'xi,q'")
        data = np.array([[float(a), float(b)] for a, b in rows[1:]])
        grid, q = data[:, 0], data[:, 1]
        return cls(grid, q, _fd_derivative(grid, q))


def _fd_derivative(x, q):
    """Fourth-order first derivative on a uniform grid (one-sided at the ends)."""
    h = x[1] - x[0]
    d = np.empty_like(q)
    d[2:-2] = (q[:-4] - 8.0 * q[1:-3] + 8.0 * q[3:-1] - q[4:]) / (12.0 * h)
    d[0] = (-25 * q[0] + 48 * q[1] - 36 * q[2] + 16 * q[3] - 3 * q[4]) / (12.0 * h)
    d[1] = (-3 * q[0] - 10 * q[1] + 18 * q[2] - 6 * q[3] + q[4]) / (12.0 * h)
    d[-1] = (25 * q[-1] - 48 * q[-2] + 36 * q[-3] - 16 * q[-4] + 3 * q[-5]) / (12.0 * h)
    d[-2] = (3 * q[-1] + 10 * q[-2] - 18 * q[-3] + 6 * q[-4] - q[-5]) / (12.0 * h)
    return d


def _initial_guess(x):
    w = 0.5 * (1.0 - np.tanh(x))
    left = np.sqrt(0.25 * (np.sqrt(x * x + 1.0) - x))
    right = np.where(x > -3.0, airy(np.maximum(x, -3.0)), 0.0)
    return w * left + (1.0 - w) * right


def _numerov_newton(x, q0, max_iter=50, tol=1e-13):
    """Damped Newton for the Numerov discretisation of ``q'' = xi q + 2 q**3``."""
    h2 = (x[1] - x[0]) ** 2 / 12.0
    q = q0.copy()

    def resid(q):
        F = x * q + 2.0 * q ** 3
        return (q[2:] - 2.0 * q[1:-1] + q[:-2]) - h2 * (F[2:] + 10.0 * F[1:-1] + F[:-2])

    r = resid(q)
    rn = np.max(np.abs(r))
    damping = []
    for _ in range(max_iter):
        dF = x + 6.0 * q * q
        n = len(q) - 2
        ab = np.zeros((3, n))
        ab[0, 1:] = 1.0 - h2 * dF[2:-1]
        ab[1, :] = -2.0 - 10.0 * h2 * dF[1:-1]
        ab[2, :-1] = 1.0 - h2 * dF[1:-2]
        step = solve_banded((1, 1), ab, -r)
        lam = 1.0
        while True:
            trial = q.copy()
            trial[1:-1] += lam * step
            rt = resid(trial)
            rtn = np.max(np.abs(rt))
            if rtn < rn or rtn <= tol:
                break
            lam *= 0.5
            if lam < 1e-6:
                raise ConvergenceError("Hastings-McLeod Newton iteration stalled",
                                       estimate=q, error=rn, trace=damping)
        damping.append(lam)
        q, r, rn = trial, rt, rtn
        if np.max(np.abs(lam * step)) <= tol and rn <= 1e-12:
            return q, damping
        if rn <= tol * 1e-2:
            return q, damping
    if rn <= 1e-11:
        return q, damping
    raise ConvergenceError("Hastings-McLeod Newton did not converge", estimate=q, error=rn,
                           trace=damping)


def solve_hastings_mcleod(xi_min=-12.0, xi_max=10.0, n=400, tol=1e-8, max_n=64000):
    """Hastings-McLeod solution as a two-point boundary value problem.

    Boundary data ``q(xi_min) = sqrt(-xi_min/2)`` and
    ``q(xi_max) = Ai(xi_max)``. The fourth-order Numerov scheme is solved
    by damped Newton (tridiagonal Jacobian) starting from a blend of the
    two tail asymptotics; the mesh is doubled, reusing the previous
    solution, until the solution changes by less than ``tol`` at the
    common nodes.

    Parameters
    ----------
    xi_min, xi_max : float
        ``xi_min <= -6`` and ``xi_max >= 6``.
    n : int
        Initial number of intervals, at least 200.

    Raises
    ------
    DomainError
        Window or resolution too small.
    ConvergenceError
        Newton failure or no mesh convergence up to ``max_n`` intervals.
    """
    if xi_min > -6.0 or xi_max < 6.0:
        raise DomainError("need xi_min <= -6 and xi_max >= 6")
    if n < 200:
        raise DomainError("need at least 200 intervals")
    x = np.linspace(xi_min, xi_max, n + 1)
    q = _initial_guess(x)
    q[0] = math.sqrt(-xi_min / 2.0)
    q[-1] = airy(xi_max)
    q, _ = _numerov_newton(x, q)
    history = []
    while True:
        n2 = 2 * (len(x) - 1)
        x2 = np.linspace(xi_min, xi_max, n2 + 1)
        guess = CubicHermiteSpline(x, q, _fd_derivative(x, q))(x2)
        guess[0], guess[-1] = q[0], q[-1]
        q2, _ = _numerov_newton(x2, guess)
        change = float(np.max(np.abs(q2[::2] - q)))
        history.append((n2, change))
        x, q = x2, q2
        if change < tol:
            break
        if n2 >= max_n:
            raise ConvergenceError("mesh refinement did not reach the tolerance",
                                   estimate=q, error=change, trace=history)
    return HMProfile(x, q, _fd_derivative(x, q), tuple(history))


_HM_CACHE = {}


def hastings_mcleod(xi_min=-12.0, xi_max=10.0, n=400):
    """Cached :func:`solve_hastings_mcleod` for the default window."""
    key = (float(xi_min), float(xi_max), int(n))
    if key not in _HM_CACHE:
        _HM_CACHE[key] = solve_hastings_mcleod(*key)
    return _HM_CACHE[key]


# ---------------------------------------------------------------------------
# edge variables
# ---------------------------------------------------------------------------

def x_from_xi_pii(xi, t):
    return -2.0 * _SQ3 * t ** 1.5 + C0 * t ** (1.0 / 3.0) * xi


def xi_from_x_pii(x, t):
    return (x + 2.0 * _SQ3 * t ** 1.5) / (C0 * t ** (1.0 / 3.0))


def x_from_xi_soliton(xi, t):
    return S_RIGHT * t ** 1.5 - C2 * t ** -0.25 * math.log(t) * xi


def xi_from_x_soliton(x, t):
    return (S_RIGHT * t ** 1.5 - x) / (C2 * t ** -0.25 * math.log(t))


# ---------------------------------------------------------------------------
# left edge
# ---------------------------------------------------------------------------

def _pii_phase(xi, t):
    """``t**(7/4) omega`` reduced modulo ``2 pi`` term by term."""
    a = math.fmod(t ** 1.75 * OMEGA0, _TWO_PI)
    b = math.fmod(OMEGA1 * xi * t ** 0.75, _TWO_PI)
    return a - b


def y_edge_pii(xi, t, hm=None):
    """Painleve II edge: ``2 sqrt(3) t**(1/2) - q(xi) cos(t**(7/4) omega) / (c1 t**(1/12))``.

    ``omega = omega0 - omega1 xi / t``; ``x = -2 sqrt(3) t**(3/2) + c0 t**(1/3) xi``.

    Raises
    ------
    DomainError
        ``t <= 0`` or ``xi`` outside the profile window.
    """
    if not t > 0.0:
        raise DomainError("the edge formula needs t > 0")
    hm = hastings_mcleod() if hm is None else hm
    qv = hm(xi)
    lead = 2.0 * _SQ3 * math.sqrt(t)
    corr = -qv * math.cos(_pii_phase(xi, t)) / (C1 * t ** (1.0 / 12.0))
    return ExpansionResult(lead, corr, "t^-2/3", Regime.EDGE_PII, {"xi": xi, "q": qv})


# ---------------------------------------------------------------------------
# right edge
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SolitonEdgeParams:
    """Constants of the soliton edge; ``k_max = None`` selects it automatically."""

    c2: float = C2
    gamma: float = GAMMA
    k_max: int = None
    tail_tol: float = 1e-13


def _log_hk(k):
    return 0.5 * k * math.log(2.0) - 0.25 * math.log(math.pi) - 0.5 * math.lgamma(k + 1.0)


def soliton_X(k, xi, t, gamma=GAMMA):
    """Pulse argument ``X_k`` for index ``k >= 0``."""
    L = math.log(t)
    return (-0.875 * (0.5 + k - xi) * L - (0.5 * math.log(_TWO_PI) + _log_hk(k))
            - (k + 0.5) * math.log(gamma))


def soliton_center(k, t, gamma=GAMMA):
    """``xi`` at which ``X_k = 0`` (``X_k`` is linear in ``xi``)."""
    B = 0.5 * math.log(_TWO_PI) + _log_hk(k) + (k + 0.5) * math.log(gamma)
    return 0.5 + k + B / (0.875 * math.log(t))


def _sech2(X):
    ax = abs(X)
    if ax > 400.0:
        return 0.0
    e = math.exp(-2.0 * ax)
    return 4.0 * e / (1.0 + e) ** 2


def _decrement(k, t, gamma):
    """``X_k - X_{k+1}``; positive while the index stays in the monotone range."""
    return 0.875 * math.log(t) + math.log(gamma) + 0.5 * math.log(2.0) - 0.5 * math.log(k + 1.0)


def _monotone_limit(t, gamma):
    """Largest k with ``X_k - X_{k+1} >= 1`` (so terms keep decaying geometrically)."""
    A = 0.875 * math.log(t) + math.log(gamma) + 0.5 * math.log(2.0) - 1.0
    return max(0, int(math.exp(2.0 * A)) - 2)


def _auto_k_max(xi, t, gamma, tail_tol):
    k_lim = _monotone_limit(t, gamma)
    k = max(0, int(math.ceil(xi - 0.5)))
    while k < k_lim:
        X = soliton_X(k + 1, xi, t, gamma)
        D = _decrement(k + 1, t, gamma)
        if X < 0.0 and D > 0.0:
            tail = 4.0 * math.exp(-2.0 * abs(X)) / (1.0 - math.exp(-2.0 * D))
            if tail < tail_tol:
                return k
        k += 1
    return k_lim


def soliton_sum_bound(xi, t, gamma=GAMMA, k_max=None):
    """Geometric upper bound on ``sum_k sech(X_k)**2``.

    ``X_k`` decreases in ``k``. With ``d_+`` (``d_-``) the smallest
    ``|X_k|`` among the non-negative (negative) ``X_k`` and ``D`` the
    smallest decrement over the summed range, each side decays at least
    like ``exp(-2 D)`` per step and ``sech(X)**2 <= 4 exp(-2 |X|)``, so the
    sum is at most ``4 (exp(-2 d_+) + exp(-2 d_-)) / (1 - exp(-2 D))``.
    """
    k_max = _auto_k_max(xi, t, gamma, 1e-13) if k_max is None else k_max
    X = [soliton_X(k, xi, t, gamma) for k in range(k_max + 1)]
    pos = [x for x in X if x >= 0.0]
    neg = [-x for x in X if x < 0.0]
    D = min(_decrement(k, t, gamma) for k in range(k_max + 2))
    q = math.exp(-2.0 * D)
    head = sum(math.exp(-2.0 * min(side)) for side in (pos, neg) if side)
    return 4.0 * head / (1.0 - q)


def y_edge_soliton(xi, t, params=None):
    """Soliton edge: ``-(2/3) sqrt(15) t**(1/2) (1 - (7/2) sum_k sech(X_k)**2)``.

    ``x = (2 sqrt(15)/27) t**(3/2) - c2 t**(-1/4) ln(t) xi``. The sum runs
    over ``k = 0 .. k_max``; by default ``k_max`` is the first index past
    the pulse nearest to ``xi`` whose remaining tail is below
    ``params.tail_tol``. ``details`` reports ``k_max`` and flags ``xi``
    within ``0.05 / ln t`` of a half-integer.

    Raises
    ------
    DomainError
        ``t <= e``.
    """
    if not t > math.e:
        raise DomainError("the soliton edge formula needs t > e")
    p = SolitonEdgeParams() if params is None else params
    k_max = _auto_k_max(xi, t, p.gamma, p.tail_tol) if p.k_max is None else int(p.k_max)
    total = math.fsum(_sech2(soliton_X(k, xi, t, p.gamma)) for k in range(k_max + 1))
    rt = math.sqrt(t)
    lead = -2.0 / 3.0 * _SQ15 * rt
    corr = 7.0 / 3.0 * _SQ15 * rt * total
    frac = xi - 0.5 - round(xi - 0.5)
    details = {
        "xi": xi,
        "k_max": k_max,
        "sech2_sum": total,
        "near_half_integer": bool(xi > -0.5 and abs(frac) < 0.05 / math.log(t)),
    }
    return ExpansionResult(lead, corr, "t^-5/4 ln^2 t", Regime.EDGE_SOLITON, details)


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------

def edge_constants_check(rtol=1e-14):
    """Recompute every edge constant from its closed form.

    Returns a dict ``name -> {value, reference, rel_error, ok}``. The
    closed forms are evaluated with ``math.pow``/``math.sqrt`` only,
    independently of the module-level constants; ``omega`` at ``xi = 0``
    is checked against ``omega0``.
    """
    closed = {
        "c0": math.pow(5.0, 1.0 / 3.0),
        "c1": math.pow(5.0, -1.0 / 6.0) * math.pow(3.0, -0.25) / 2.0,
        "c2": math.sqrt(7.0) * math.pow(3.0, 0.75) / (8.0 * math.pow(5.0, 0.25)),
        "gamma": 4.0 * math.sqrt(2.0) * math.pow(5.0, 0.375) * math.pow(7.0, 1.25)
        * math.pow(3.0, -1.375),
        "omega0": 80.0 / 21.0 * math.sqrt(5.0) * math.pow(3.0, 0.75),
        "omega1": 2.0 * math.pow(3.0, 0.25) * math.pow(5.0, 5.0 / 6.0),
        "s_left": -2.0 * math.sqrt(3.0),
        "s_right": 2.0 * math.sqrt(15.0) / 27.0,
    }
    module = {"c0": C0, "c1": C1, "c2": C2, "gamma": GAMMA, "omega0": OMEGA0,
              "omega1": OMEGA1, "s_left": S_LEFT, "s_right": S_RIGHT}
    report = {}
    for name, val in closed.items():
        ref = _REFERENCE[name]
        err = max(abs(val - ref), abs(module[name] - ref)) / abs(ref)
        report[name] = {"value": val, "reference": ref, "rel_error": err, "ok": err <= rtol}
    omega_at_0 = OMEGA0 - OMEGA1 * 0.0 / 1.0
    err = abs(omega_at_0 - _REFERENCE["omega0"]) / _REFERENCE["omega0"]
    report["omega(xi=0)"] = {"value": omega_at_0, "reference": _REFERENCE["omega0"],
                             "rel_error": err, "ok": err <= rtol}
    return report
