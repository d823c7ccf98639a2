"""Modulation equations for the branch points of the genus-one curve.

For ``s`` in ``[S_LEFT, S_RIGHT]`` the branch points
``beta3 < alpha < beta2 < beta1`` (``alpha = -(beta3+beta2+beta1)/2``)
solve

    r1 = (sum b)^2 + 2 sum b^2 - 120 = 0
    r2 = (sum b)^3 - 4 sum b^3 - 360 s = 0
    r3 = int_{b3}^{b2} sqrt(x-b3) (x-alpha) sqrt(b2-x) sqrt(b1-x) dx = 0

At ``S_LEFT`` the points ``beta3 = beta2`` merge, at ``S_RIGHT`` the
points ``beta2 = beta1`` merge. The solution branch is traced once per
process by pseudo-arclength continuation from both merged endpoints, and
individual solves are Newton polishes seeded from that branch.

Newton and the continuation work with ``r3 / (beta2 - beta3)**2``; the
unreduced ``r3`` also vanishes on the spurious family ``beta3 = beta2``.
"""

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .core import S_LEFT, S_RIGHT
from .errors import (
    DomainError,
    InternalConsistencyError,
    ResolutionError,
    SolverError,
)
from .specfn import QuadratureSpec, elliptic_KE, EllipticModulus, integrate

__all__ = [
    "ModulationPoint",
    "ContinuationTrace",
    "WhithamReport",
    "LEFT_CONFLUENT",
    "RIGHT_CONFLUENT",
    "residuals",
    "solve_modulation",
    "continuation_sweep",
    "whitham_velocities",
    "whitham_pointwise",
    "whitham_residual",
    "branch_mismatch",
]

_SQ3 = math.sqrt(3.0)
_SQ15 = math.sqrt(15.0)
ENDPOINT_GUARD = 1e-7
_R3_SPEC = QuadratureSpec(rel_tol=1e-13, abs_tol=1e-15, max_subdivisions=400)


@dataclass(frozen=True)
class ModulationPoint:
    """Branch points at a given ``s``; ``alpha`` is derived."""

    s: float
    beta3: float
    beta2: float
    beta1: float
    alpha: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", -0.5 * (self.beta3 + self.beta2 + self.beta1))

    @property
    def betas(self):
        return np.array([self.beta3, self.beta2, self.beta1])

    def is_ordered(self, strict=False):
        b3, a, b2, b1 = self.beta3, self.alpha, self.beta2, self.beta1
        if strict:
            return b3 < a < b2 < b1
        return b3 <= a <= b2 <= b1


LEFT_CONFLUENT = ModulationPoint(S_LEFT, -_SQ3, -_SQ3, 4.0 * _SQ3)
RIGHT_CONFLUENT = ModulationPoint(S_RIGHT, -4.0 * _SQ15 / 3.0, _SQ15, _SQ15)


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------

def _r12(b3, b2, b1, s):
    S = b3 + b2 + b1
    r1 = S * S + 2.0 * (b3 * b3 + b2 * b2 + b1 * b1) - 120.0
    r2 = S ** 3 - 4.0 * (b3 ** 3 + b2 ** 3 + b1 ** 3) - 360.0 * s
    return r1, r2


def residuals(m, spec=None):
    """The three modulation residuals ``(r1, r2, r3)`` at ``m``.

    ``r3`` is the raw integral, computed with the square-root
    substitution at both endpoints.
    """
    spec = _R3_SPEC if spec is None else spec
    b3, b2, b1, a = m.beta3, m.beta2, m.beta1, m.alpha
    r1, r2 = _r12(b3, b2, b1, m.s)

    def f(x):
        return (np.sqrt(np.maximum(x - b3, 0.0)) * (x - a) * np.sqrt(np.maximum(b2 - x, 0.0))
                * np.sqrt(np.maximum(b1 - x, 0.0)))

    r3, _ = integrate(f, b3, b2, spec.with_exponents(0.5, 0.5))
    return r1, r2, r3


def _r3_reduced(b3, b2, b1, spec=_R3_SPEC):
    """``r3 / (b2 - b3)**2`` via ``x = b3 + (b2 - b3) sin(phi)**2``."""
    a = -0.5 * (b3 + b2 + b1)
    d = b2 - b3

    def f(phi):
        sp = np.sin(phi)
        cp = np.cos(phi)
        x = b3 + d * sp * sp
        return 2.0 * (sp * cp) ** 2 * (x - a) * np.sqrt(np.maximum(b1 - x, 0.0))

    return integrate(f, 0.0, 0.5 * math.pi, spec)[0]


def _F(v, spec=_R3_SPEC):
    b3, b2, b1, s = v
    r1, r2 = _r12(b3, b2, b1, s)
    return np.array([r1, r2, _r3_reduced(b3, b2, b1, spec)])


def _jacobian(v, cols, spec=_R3_SPEC):
    """Central-difference Jacobian of ``_F`` in the listed coordinates."""
    v = np.asarray(v, dtype=float)
    h = 1e-6 * max(1.0, float(np.max(np.abs(v[:3]))))
    J = np.empty((3, len(cols)))
    for j, c in enumerate(cols):
        e = np.zeros(4)
        e[c] = h
        J[:, j] = (_F(v + e, spec) - _F(v - e, spec)) / (2.0 * h)
    return J


# ---------------------------------------------------------------------------
# global branch by pseudo-arclength continuation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Branch:
    lam: np.ndarray       # arclength parameter
    v: np.ndarray         # (n, 4): beta3, beta2, beta1, s
    tangent: np.ndarray   # (n, 4) unit tangents, oriented along increasing s


def _null_tangent(v, prev=None):
    J = _jacobian(v, (0, 1, 2, 3))
    _, _, vt = np.linalg.svd(J)
    tan = vt[-1]
    if prev is not None and tan @ prev < 0.0:
        tan = -tan
    return tan


def _arclength_trace(start, first_tangent, stop, ds0=0.02, ds_max=0.08, max_steps=4000):
    """Trace the branch from a merged endpoint until ``stop(v)`` is true."""
    v = np.array(start, dtype=float)
    tan = np.array(first_tangent, dtype=float)
    tan /= np.linalg.norm(tan)
    pts = [v.copy()]
    tans = [tan.copy()]
    ds = ds0
    for _ in range(max_steps):
        pred = v + ds * tan
        w = pred.copy()
        ok = False
        for it in range(12):
            A = np.vstack([_jacobian(w, (0, 1, 2, 3)), tan])
            rhs = np.concatenate([_F(w), [tan @ (w - pred)]])
            dw = np.linalg.solve(A, -rhs)
            w = w + dw
            if np.max(np.abs(dw)) < 1e-12 * max(1.0, np.max(np.abs(w))):
                ok = np.max(np.abs(_F(w))) < 1e-10
                break
        if not ok:
            ds *= 0.5
            if ds < 1e-8:
                raise SolverError("branch continuation stalled", estimate=v, trace=pts)
            continue
        if stop(w):
            return np.array(pts), np.array(tans)
        new_tan = _null_tangent(w, tan)
        v, tan = w, new_tan
        pts.append(v.copy())
        tans.append(tan.copy())
        if it <= 3:
            ds = min(ds_max, 1.5 * ds)
    raise SolverError("branch continuation exceeded its step budget", trace=pts)


@lru_cache(maxsize=1)
def _branch_pair():
    """Branches traced from the left and from the right merged endpoint.

    Each is returned ordered by increasing ``s`` with tangents oriented
    the same way.
    """
    left0 = np.array([LEFT_CONFLUENT.beta3, LEFT_CONFLUENT.beta2, LEFT_CONFLUENT.beta1, S_LEFT])
    right0 = np.array([RIGHT_CONFLUENT.beta3, RIGHT_CONFLUENT.beta2, RIGHT_CONFLUENT.beta1, S_RIGHT])
    # at the merged endpoints the branch leaves along the separating direction
    t_left = _null_tangent(left0, np.array([-1.0, 1.0, 0.0, 0.0]))
    t_right = _null_tangent(right0, np.array([0.0, -1.0, 1.0, 0.0]))
    pl, tl = _arclength_trace(left0, t_left, lambda w: w[2] - w[1] <= 0.0)
    pr, tr = _arclength_trace(right0, t_right, lambda w: w[1] - w[0] <= 0.0)
    left = _finish_branch(np.vstack([pl, right0]), np.vstack([tl, -t_right]))
    right = _finish_branch(np.vstack([pr, left0])[::-1], -np.vstack([tr, -t_left])[::-1])
    return left, right


def _finish_branch(v, tangent):
    if np.any(np.diff(v[:, 3]) <= 0.0):
        raise InternalConsistencyError("traced branch is not monotone in s")
    lam = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(v, axis=0), axis=1))])
    return _Branch(lam, v, tangent)


def _branch_seed(branch, s):
    """Cubic Hermite interpolation of the branch in arclength at given ``s``."""
    vs = branch.v[:, 3]
    k = int(np.clip(np.searchsorted(vs, s) - 1, 0, len(vs) - 2))
    v0, v1 = branch.v[k], branch.v[k + 1]
    h = branch.lam[k + 1] - branch.lam[k]
    m0, m1 = branch.tangent[k] * h, branch.tangent[k + 1] * h

    def herm(u):
        u2, u3 = u * u, u * u * u
        return ((2 * u3 - 3 * u2 + 1) * v0 + (u3 - 2 * u2 + u) * m0
                + (-2 * u3 + 3 * u2) * v1 + (u3 - u2) * m1)

    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if herm(mid)[3] < s:
            lo = mid
        else:
            hi = mid
    return herm(0.5 * (lo + hi))[:3]


_BRANCH_SPLIT = 0.5 * (S_LEFT + S_RIGHT)


def branch_mismatch(samples=7):
    """Largest difference of the two one-sided branches on interior ``s``.

    Both continuations are polished by Newton at each sample so the
    comparison measures branch identity, not interpolation error.
    """
    left, right = _branch_pair()
    worst = 0.0
    for s in np.linspace(S_LEFT + 0.3, S_RIGHT - 0.1, samples):
        a = _newton_fixed_s(_branch_seed(left, s), s)[0]
        b = _newton_fixed_s(_branch_seed(right, s), s)[0]
        worst = max(worst, float(np.max(np.abs(a - b))))
    return worst


# ---------------------------------------------------------------------------
# fixed-s Newton
# ---------------------------------------------------------------------------

def _newton_fixed_s(seed, s, spec=_R3_SPEC, max_iter=30, res_tol=1e-10):
    b = np.array(seed, dtype=float)
    F = _F(np.append(b, s), spec)
    fn = np.max(np.abs(F))
    history = [fn]
    for it in range(1, max_iter + 1):
        J = _jacobian(np.append(b, s), (0, 1, 2), spec)
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError as exc:
            raise SolverError("singular modulation Jacobian", estimate=b, trace=history) from exc
        lam = 1.0
        for _ in range(12):
            trial = b + lam * step
            Ft = _F(np.append(trial, s), spec)
            ft = np.max(np.abs(Ft))
            if ft < fn or ft <= res_tol:
                break
            lam *= 0.5
        else:
            raise SolverError("damped Newton could not reduce the residual",
                              estimate=b, error=fn, trace=history)
        b, F, fn = trial, Ft, ft
        history.append(fn)
        small = np.max(np.abs(lam * step)) <= 1e-12 * max(1.0, np.max(np.abs(b)))
        if fn <= res_tol and (small or it > 1 and history[-2] <= res_tol):
            return b, it
    raise SolverError("Newton did not converge", estimate=b, error=fn, trace=history)


def _confluent(s):
    if abs(s - S_LEFT) <= ENDPOINT_GUARD:
        return LEFT_CONFLUENT if s == S_LEFT else ModulationPoint(
            s, LEFT_CONFLUENT.beta3, LEFT_CONFLUENT.beta2, LEFT_CONFLUENT.beta1)
    if abs(s - S_RIGHT) <= ENDPOINT_GUARD:
        return RIGHT_CONFLUENT if s == S_RIGHT else ModulationPoint(
            s, RIGHT_CONFLUENT.beta3, RIGHT_CONFLUENT.beta2, RIGHT_CONFLUENT.beta1)
    return None


def _check_s(s):
    s = float(s)
    if not (S_LEFT - 1e-14 <= s <= S_RIGHT + 1e-14):
        raise DomainError(f"s = {s} outside [{S_LEFT}, {S_RIGHT}]")
    return min(max(s, S_LEFT), S_RIGHT)


def solve_modulation(s, seed=None, spec=None, return_iterations=False):
    """Solve the modulation equations at ``s``.

    Parameters
    ----------
    s : float
        In ``[S_LEFT, S_RIGHT]``. Within ``1e-7`` of an endpoint the exact
        merged solution is returned.
    seed : ModulationPoint, optional
        Starting point for Newton; by default a point interpolated from the
        continuation branch.
    spec : QuadratureSpec, optional
        Quadrature settings for the integral equation.
    return_iterations : bool
        Also return the number of Newton iterations.

    Raises
    ------
    SolverError
        Newton and the step-halving continuation retry both failed.
    """
    s = _check_s(s)
    spec = _R3_SPEC if spec is None else spec
    exact = _confluent(s)
    if exact is not None:
        return (exact, 0) if return_iterations else exact
    if seed is not None:
        start = seed.betas
    else:
        left, right = _branch_pair()
        start = _branch_seed(left if s <= _BRANCH_SPLIT else right, s)
    try:
        b, its = _newton_fixed_s(start, s, spec)
    except SolverError:
        b, its = _continuation_retry(s, spec)
    m = ModulationPoint(s, *b)
    if not m.is_ordered(strict=True):
        b, its = _continuation_retry(s, spec)
        m = ModulationPoint(s, *b)
        if not m.is_ordered(strict=True):
            raise SolverError(f"solution at s = {s} violates the branch ordering", estimate=b)
    return (m, its) if return_iterations else m


def _continuation_retry(s, spec):
    """Walk in ``s`` from the nearest branch node, halving failed steps."""
    left, right = _branch_pair()
    branch = left if s <= _BRANCH_SPLIT else right
    vs = branch.v[:, 3]
    k = int(np.argmin(np.abs(vs - s)))
    if abs(vs[k] - s) < 1e-15 or k in (0, len(vs) - 1):
        k = int(np.clip(k, 1, len(vs) - 2))
    cur_s, cur_b = vs[k], branch.v[k, :3]
    total = 0
    h = s - cur_s
    while cur_s != s:
        nxt = s if abs(s - cur_s) <= abs(h) else cur_s + h
        try:
            cur_b, its = _newton_fixed_s(cur_b, nxt, spec)
            total += its
            cur_s = nxt
        except SolverError:
            h *= 0.5
            if abs(h) < 1e-10:
                raise SolverError(f"continuation retry failed at s = {nxt}",
                                  estimate=cur_b, trace=[cur_s, nxt])
    return cur_b, total


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContinuationTrace:
    """Accepted solutions of a sweep with step sizes and Newton counts."""

    points: tuple
    steps: tuple
    newton_iterations: tuple

    def __len__(self):
        return len(self.points)

    @property
    def s(self):
        return np.array([p.s for p in self.points])

    def betas(self):
        return np.array([[p.beta3, p.beta2, p.beta1] for p in self.points])

    CSV_HEADER = ("s", "beta3", "alpha", "beta2", "beta1", "r1", "r2", "r3")

    def to_csv(self, dest=None):
        """Write the trace as CSV (header ``s,beta3,alpha,beta2,beta1,r1,r2,r3``).

        ``dest`` may be a path, an open text file or ``None`` (return a string).
        """
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_HEADER)
        for p in self.points:
            r = residuals(p)
            w.writerow([format(v, ".17g") for v in (p.s, p.beta3, p.alpha, p.beta2, p.beta1, *r)])
        text = buf.getvalue()
        if dest is None:
            return text
        if hasattr(dest, "write"):
            dest.write(text)
        else:
            with open(dest, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return text


def continuation_sweep(s_from, s_to, n_min=50, spec=None):
    """Solve on at least ``n_min`` points from ``s_from`` to ``s_to``.

    Points are evenly spaced in ``s``. A failed solve inserts the midpoint
    of the last accepted step and retries, so the trace stays monotone.
    """
    s_from, s_to = _check_s(s_from), _check_s(s_to)
    if s_from == s_to:
        m, its = solve_modulation(s_from, spec=spec, return_iterations=True)
        return ContinuationTrace((m,), (0.0,), (its,))
    targets = list(np.linspace(s_from, s_to, max(int(n_min), 2)))
    points, steps, counts = [], [], []
    prev_s = None
    while targets:
        s = targets[0]
        try:
            m, its = solve_modulation(s, spec=spec, return_iterations=True)
        except SolverError:
            if prev_s is None or abs(s - prev_s) < 1e-9:
                raise
            targets.insert(0, 0.5 * (prev_s + s))
            continue
        targets.pop(0)
        steps.append(0.0 if prev_s is None else s - prev_s)
        counts.append(its)
        points.append(m)
        prev_s = s
    return ContinuationTrace(tuple(points), tuple(steps), tuple(counts))


# ---------------------------------------------------------------------------
# Whitham characterisation
# ---------------------------------------------------------------------------

def whitham_velocities(bt):
    """Characteristic speeds for ``bt = (b3, b2, b1)`` (descending: b1 largest).

    Returns ``(v, singular)`` where ``v`` is ordered like ``bt`` and
    ``singular`` flags a vanishing denominator or a collapsed curve;
    entries that cannot be formed are ``nan``.
    """
    b3, b2, b1 = (float(x) for x in bt)
    scale = max(1.0, abs(b1), abs(b2), abs(b3))
    v = np.full(3, np.nan)
    if b1 - b3 <= 1e-12 * scale:
        return v, True
    sig = EllipticModulus(math.sqrt(max(b2 - b3, 0.0) / (b1 - b3)),
                          math.sqrt(max(b1 - b2, 0.0) / (b1 - b3)))
    if sig.sigma_c == 0.0:
        return v, True
    K, E = elliptic_KE(sig)
    a = -b1 + (b1 - b3) * E / K
    total = b1 + b2 + b3
    vals = (b3, b2, b1)
    singular = False
    for i, bi in enumerate(vals):
        den = bi + a
        if abs(den) <= 1e-12 * scale:
            singular = True
            continue
        num = 1.0
        for k, bk in enumerate(vals):
            if k != i:
                num *= bi - bk
        v[i] = 2.0 / 3.0 * num / den + total / 3.0
    return v, singular


def _beta_tilde(x, t, beta_scale, spec):
    m = solve_modulation(x * t ** -1.5, spec=spec)
    return beta_scale * math.sqrt(t) * m.betas


def whitham_pointwise(s, t, step, beta_scale=1.0, spec=None):
    """PDE residual ``d_t b + v d_x b`` at ``x = s t**1.5`` by central differences.

    Steps are relative: ``dt = step t`` and ``dx = step t**1.5``, so the
    stencil is invariant under ``(x, t) -> (l**1.5 x, l t)``. Every stencil
    node gets its own modulation solve. ``beta_scale`` multiplies
    ``t**(1/2) beta`` in the definition of the Whitham variables.

    Returns
    -------
    residual, dbdt, singular
    """
    x = s * t ** 1.5
    dt, dx = step * t, step * t ** 1.5
    bt = _beta_tilde(x, t, beta_scale, spec)
    dbdt = (_beta_tilde(x, t + dt, beta_scale, spec) - _beta_tilde(x, t - dt, beta_scale, spec)) / (2 * dt)
    dbdx = (_beta_tilde(x + dx, t, beta_scale, spec) - _beta_tilde(x - dx, t, beta_scale, spec)) / (2 * dx)
    v, singular = whitham_velocities(bt)
    return dbdt + v * dbdx, dbdt, singular


@dataclass(frozen=True)
class WhithamReport:
    """Normalised Whitham residuals per step size and observed orders."""

    steps: tuple
    residuals: tuple
    orders: tuple
    singular_points: tuple
    beta_scale: float
    n_points: int

    @property
    def min_order(self):
        return min(self.orders) if self.orders else float("nan")


def whitham_residual(trace, t_grid, steps=(0.02, 0.01, 0.005), beta_scale=1.0, spec=None):
    """Check that ``t**(1/2) beta(x t**(-3/2))`` solves the Whitham system.

    Parameters
    ----------
    trace : ContinuationTrace
        Supplies the ``s`` sample points (interior points only are used).
    t_grid : sequence of float
        Positive times.
    steps : sequence of float
        Relative difference steps, typically successive halvings.
    beta_scale : float
        Factor in ``beta_tilde = beta_scale t**(1/2) beta``.

    Returns
    -------
    WhithamReport
        ``residuals[j]`` is ``max |residual| / max |d_t beta_tilde|`` at
        ``steps[j]``; ``orders`` are ``log2`` ratios of consecutive entries
        (scaled by the actual step ratio).

    Raises
    ------
    ResolutionError
        The time derivatives at consecutive steps disagree by more than
        10 percent, i.e. the stencil does not resolve the solution.
    """
    if any(not t > 0 for t in t_grid):
        raise DomainError("t_grid must be positive")
    steps = tuple(float(h) for h in steps)
    s_vals = [p.s for p in trace.points]
    res_norm, flagged = [], []
    prev_dbdt = None
    for h in steps:
        worst_res, worst_dt = 0.0, 0.0
        dbdt_all = []
        for s in s_vals:
            if not (S_LEFT + 2 * h * abs(S_LEFT) < s < S_RIGHT - 2 * h * max(1.0, abs(s)) - 1e-3):
                continue
            for t in t_grid:
                r, dbdt, singular = whitham_pointwise(s, t, h, beta_scale, spec)
                dbdt_all.append(dbdt)
                if singular or not np.all(np.isfinite(r)):
                    flagged.append((s, t, h))
                    continue
                worst_res = max(worst_res, float(np.max(np.abs(r))))
                worst_dt = max(worst_dt, float(np.max(np.abs(dbdt))))
        if not dbdt_all:
            raise ResolutionError("no interior trace points usable for differencing")
        dbdt_all = np.array(dbdt_all)
        if prev_dbdt is not None:
            gap = np.max(np.abs(dbdt_all - prev_dbdt)) / max(np.max(np.abs(dbdt_all)), 1e-300)
            if gap > 0.1:
                raise ResolutionError(f"time derivatives change by {gap:.3g} under step halving")
        prev_dbdt = dbdt_all
        res_norm.append(worst_res / worst_dt if worst_dt > 0 else float("nan"))
    orders = []
    for j in range(1, len(steps)):
        ratio = steps[j - 1] / steps[j]
        orders.append(math.log(res_norm[j - 1] / res_norm[j]) / math.log(ratio))
    return WhithamReport(steps, tuple(res_norm), tuple(orders), tuple(flagged),
                         float(beta_scale), len(s_vals) * len(t_grid))
