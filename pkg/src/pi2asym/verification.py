"""Self-verification suite aggregated by the ``verify`` subcommand.

Each check returns a :class:`CheckResult` with one or more metrics. A
metric compares a measured number against a tolerance: ``kind='max'``
passes when ``measured <= tolerance``, ``kind='min'`` when
``measured >= tolerance``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import algebraic, critical, elliptic, modulation, specfn
from .core import S_LEFT, S_RIGHT, ScalePoint

__all__ = ["Metric", "CheckResult", "CHECKS", "run_checks"]


@dataclass
class Metric:
    name: str
    measured: float
    tolerance: float
    kind: str = "max"

    def __post_init__(self):
        self.measured = float(self.measured)
        self.tolerance = float(self.tolerance)

    @property
    def passed(self):
        if not math.isfinite(self.measured):
            return False
        if self.kind == "max":
            return self.measured <= self.tolerance
        return self.measured >= self.tolerance

    def as_dict(self):
        return {"metric": self.name, "measured": self.measured, "tolerance": self.tolerance,
                "kind": self.kind, "passed": self.passed}


@dataclass
class CheckResult:
    name: str
    metrics: list
    info: dict = field(default_factory=dict)
    error: str = None

    @property
    def passed(self):
        return self.error is None and all(m.passed for m in self.metrics)

    def as_dict(self):
        return {"check": self.name, "passed": self.passed,
                "metrics": [m.as_dict() for m in self.metrics],
                "info": self.info, "error": self.error}


def _tol(tols, check, metric, default):
    for key in (f"{check}.{metric}", check, "all"):
        if key in tols:
            return float(tols[key])
    return default


# ---------------------------------------------------------------------------

def check_specfn(tols):
    name = "specfn-identities"
    half_pi = 0.5 * math.pi
    agm = 0.0
    for sig in (0.1, 0.3, 0.5, 0.8, 0.95):
        kq = specfn.integrate(lambda p: 1.0 / np.sqrt(1.0 - (sig * np.sin(p)) ** 2), 0.0, half_pi)[0]
        eq = specfn.integrate(lambda p: np.sqrt(1.0 - (sig * np.sin(p)) ** 2), 0.0, half_pi)[0]
        agm = max(agm, abs(specfn.elliptic_K(sig) / kq - 1.0), abs(specfn.elliptic_E(sig) / eq - 1.0))
    leg = 0.0
    for sig in np.linspace(0.05, 0.95, 19):
        m = specfn.EllipticModulus(sig)
        K, E = specfn.elliptic_KE(m)
        mc = specfn.EllipticModulus(m.sigma_c, m.sigma)
        Kp, Ep = specfn.elliptic_KE(mc)
        leg = max(leg, abs(E * Kp + Ep * K - K * Kp - half_pi))
    per = 0.0
    for tau in (1j, 2j):
        for z in (0.0, 0.3, 0.7):
            th = specfn.theta3(complex(z), tau)
            per = max(per, abs(specfn.theta3(complex(z + 1.0), tau) - th) / abs(th))
            shifted = specfn.theta3(complex(z) + tau, tau) * np.exp(1j * math.pi * tau + 2j * math.pi * z)
            per = max(per, abs(shifted - th) / abs(th))
    fd = 0.0
    h = 1e-3
    tau = 1j
    for z in (0.0, 0.1, 0.4):
        f = [specfn.theta3(z + k * h, tau) for k in (-2, -1, 0, 1, 2)]
        num = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h ** 2)
        exact = specfn.theta3_derivs(z, tau, 2)
        fd = max(fd, abs(num / exact - 1.0))
    return CheckResult(name, [
        Metric("agm_vs_quadrature", agm, _tol(tols, name, "agm_vs_quadrature", 1e-10)),
        Metric("legendre_relation", leg, _tol(tols, name, "legendre_relation", 1e-12)),
        Metric("theta_periodicity", per, _tol(tols, name, "theta_periodicity", 1e-12)),
        Metric("theta_dd_vs_fd", fd, _tol(tols, name, "theta_dd_vs_fd", 1e-6)),
    ])


PROP_G_CASES = ((-10.0, -1), (-4.0, -1), (1.0, -1), (5.0, -1),
                (-5.0, 1), (-4.0, 1), (0.6, 1), (1.0, 1), (5.0, 1))


def check_prop_g(tols):
    name = "prop-g-scan"
    count = 0
    info = {}
    for s, sg in PROP_G_CASES:
        rep = algebraic.check_proposition_g(algebraic.algebraic_g(s, sg), radius=1e3, n_points=1000)
        bad = len(rep.g_violations) + len(rep.gprime_violations) + len(rep.discriminant_violations)
        count += bad
        info[f"s={s:g},sign_t={sg:+d}"] = bad
    return CheckResult(name, [Metric("violations", float(count), _tol(tols, name, "violations", 0.0))], info)


def check_modulation_endpoints(tols):
    name = "modulation-endpoints"
    r3, r15 = math.sqrt(3.0), math.sqrt(15.0)
    a = modulation.solve_modulation(S_LEFT)
    b = modulation.solve_modulation(S_RIGHT)
    err = max(np.max(np.abs(a.betas - [-r3, -r3, 4 * r3])),
              np.max(np.abs(b.betas - [-4 * r15 / 3, r15, r15])))
    res = max(max(abs(v) for v in modulation.residuals(a)), max(abs(v) for v in modulation.residuals(b)))
    return CheckResult(name, [
        Metric("endpoint_error", float(err), _tol(tols, name, "endpoint_error", 1e-9)),
        Metric("endpoint_residual", float(res), _tol(tols, name, "endpoint_residual", 1e-9)),
    ])


G_JUMP_S = (-3.2, -2.0, -1.0, 0.0, 0.2)


def check_g_jumps(tols):
    name = "g-jumps"
    sum_band = sum_left = diff_band = omega = literal = 0.0
    for s in G_JUMP_S:
        m = modulation.solve_modulation(s)
        d = elliptic.derive_elliptic(m)
        b3, b2, b1 = m.beta3, m.beta2, m.beta1
        for x in np.linspace(b2, b1, 7)[1:-1]:
            sum_band = max(sum_band, abs(elliptic.g_elliptic(x, m, "+") + elliptic.g_elliptic(x, m, "-")))
        for x in b3 - np.array([0.05, 0.5, 1.0, 3.0, 10.0]):
            sum_left = max(sum_left, abs(elliptic.g_elliptic(x, m, "+") + elliptic.g_elliptic(x, m, "-")))
        for x in np.linspace(b3, b2, 7)[1:-1]:
            jump = elliptic.g_elliptic(x, m, "+") - elliptic.g_elliptic(x, m, "-")
            diff_band = max(diff_band, abs(jump + 1j * d.Omega))
        gp = elliptic.g_elliptic(b3, m, "+")
        omega = max(omega, abs(2j * gp - d.Omega) / d.Omega)
        literal = max(literal, abs(-2j * gp - d.Omega) / d.Omega)
    return CheckResult(name, [
        Metric("sum_on_b2_b1", sum_band, _tol(tols, name, "sum_on_b2_b1", 1e-9)),
        Metric("sum_below_b3", sum_left, _tol(tols, name, "sum_below_b3", 1e-9)),
        Metric("difference_on_b3_b2", diff_band, _tol(tols, name, "difference_on_b3_b2", 1e-9)),
        Metric("omega_vs_2i_gplus_b3", omega, _tol(tols, name, "omega_vs_2i_gplus_b3", 1e-8)),
    ], {"relative_gap_of_minus_2i_gplus_b3": literal})


def dual_form_grid(ns=10, nt=5):
    """Max relative (A)/(B) gap over the standard (s, t) grid."""
    worst = 0.0
    for s in np.linspace(S_LEFT + 0.3, S_RIGHT - 0.03, ns):
        d = elliptic.derive_elliptic(modulation.solve_modulation(s))
        for t in np.linspace(1.0, 16.0, nt):
            worst = max(worst, elliptic.y_elliptic_forms(d, t).relative_gap)
    return worst


def check_dual_form(tols):
    name = "dual-form"
    return CheckResult(name, [Metric("max_relative_gap", dual_form_grid(),
                                     _tol(tols, name, "max_relative_gap", 1e-8))])


def whitham_window_trace(n=6):
    return modulation.continuation_sweep(S_LEFT + 0.3, S_RIGHT - 0.05, n)


def check_whitham(tols):
    name = "whitham-order"
    trace = whitham_window_trace()
    t_grid = (1.0, 2.0, 4.0)
    literal = modulation.whitham_residual(trace, t_grid, beta_scale=1.0)
    half = modulation.whitham_residual(trace, t_grid, beta_scale=0.5)
    return CheckResult(name, [
        Metric("min_order", literal.min_order, _tol(tols, name, "min_order", 1.8), kind="min"),
    ], {"normalised_residuals": list(literal.residuals),
        "orders": list(literal.orders),
        "half_scale_residuals": list(half.residuals),
        "half_scale_orders": list(half.orders),
        "singular_points": len(literal.singular_points)})


def check_hm(tols):
    name = "hm-tails"
    hm = critical.hastings_mcleod()
    x, q = hm.grid, hm.q
    right = x >= x[-1] - 2.0
    left = x <= x[0] + 2.0
    r_err = float(np.max(np.abs(q[right] - specfn.airy(x[right]))))
    l_err = float(np.max(np.abs(q[left] - np.sqrt(-x[left] / 2.0))))
    mesh = float(hm.refinements[-1][1]) if hm.refinements else float("nan")
    return CheckResult(name, [
        Metric("ode_residual", hm.ode_residual(), _tol(tols, name, "ode_residual", 1e-6)),
        Metric("right_tail", r_err, _tol(tols, name, "right_tail", 1e-6)),
        Metric("left_tail", l_err, _tol(tols, name, "left_tail", 1e-3)),
        Metric("mesh_halving", mesh, _tol(tols, name, "mesh_halving", 1e-7)),
        Metric("nonpositive_nodes", float(np.sum(q <= 0.0)), _tol(tols, name, "nonpositive_nodes", 0.0)),
    ], {"q(0)": hm(0.0), "nodes": len(x)})


def check_edge_constants(tols):
    name = "edge-constants"
    rep = critical.edge_constants_check()
    worst = max(v["rel_error"] for v in rep.values())
    return CheckResult(name, [Metric("max_rel_error", worst, _tol(tols, name, "max_rel_error", 1e-14))],
                       {k: v["value"] for k, v in rep.items()})


def boundary_limits():
    """Distances of the bulk leading coefficients from the edge values."""
    t = 1.0
    left_ref = 2.0 * math.sqrt(3.0)
    right_ref = -2.0 / 3.0 * math.sqrt(15.0)
    alg_left = abs(algebraic.y_algebraic(ScalePoint.from_st(S_LEFT, t)).leading - left_ref)
    alg_right = abs(algebraic.y_algebraic(ScalePoint.from_st(S_RIGHT, t)).leading - right_ref)
    dl = elliptic.derive_elliptic(modulation.solve_modulation(S_LEFT + 1e-4))
    dr = elliptic.derive_elliptic(modulation.solve_modulation(S_RIGHT - 1e-4))
    ell_left = abs(elliptic.y_elliptic_forms(dl, t).mean_part - left_ref)
    ell_right = abs(elliptic.y_elliptic_forms(dr, t).mean_part - right_ref)
    edge_left = abs(critical.y_edge_pii(0.0, 10.0).leading / math.sqrt(10.0) - left_ref)
    edge_right = abs(critical.y_edge_soliton(0.0, 10.0).leading / math.sqrt(10.0) - right_ref)
    return {"algebraic_left": alg_left, "algebraic_right": alg_right,
            "elliptic_left": ell_left, "elliptic_right": ell_right,
            "edge_left": edge_left, "edge_right": edge_right}


def check_boundary(tols):
    name = "boundary-matching"
    lim = boundary_limits()
    metrics = [
        Metric("algebraic_left", lim["algebraic_left"], _tol(tols, name, "algebraic_left", 1e-10)),
        Metric("algebraic_right", lim["algebraic_right"], _tol(tols, name, "algebraic_right", 1e-10)),
        Metric("edge_left", lim["edge_left"], _tol(tols, name, "edge_left", 1e-10)),
        Metric("edge_right", lim["edge_right"], _tol(tols, name, "edge_right", 1e-10)),
        Metric("elliptic_left", lim["elliptic_left"], _tol(tols, name, "elliptic_left", 1e-4)),
        Metric("elliptic_right", lim["elliptic_right"], _tol(tols, name, "elliptic_right", 1e-4)),
    ]
    return CheckResult(name, metrics)


CHECKS = {
    "specfn-identities": check_specfn,
    "prop-g-scan": check_prop_g,
    "modulation-endpoints": check_modulation_endpoints,
    "g-jumps": check_g_jumps,
    "dual-form": check_dual_form,
    "whitham-order": check_whitham,
    "hm-tails": check_hm,
    "edge-constants": check_edge_constants,
    "boundary-matching": check_boundary,
}


def run_checks(only=None, tols=None):
    """Run the named checks (all by default) and return their results in order."""
    tols = {} if tols is None else dict(tols)
    names = list(CHECKS) if not only else list(only)
    results = []
    for n in names:
        if n not in CHECKS:
            raise KeyError(f"unknown check {n!r}; choose from {sorted(CHECKS)}")
        try:
            results.append(CHECKS[n](tols))
        except Exception as exc:  # report, never crash the suite
            results.append(CheckResult(n, [], error=f"{type(exc).__name__}: {exc}"))
    return results
