import math

import numpy as np
import pytest
from scipy import integrate as sci_integrate
from scipy import optimize

from pi2asym import modulation
from pi2asym.core import S_LEFT, S_RIGHT
from pi2asym.errors import DomainError
from pi2asym.modulation import (
    LEFT_CONFLUENT,
    RIGHT_CONFLUENT,
    ModulationPoint,
    continuation_sweep,
    residuals,
    solve_modulation,
)

SQ3 = math.sqrt(3.0)
SQ15 = math.sqrt(15.0)


@pytest.mark.parametrize("m", [LEFT_CONFLUENT, RIGHT_CONFLUENT])
def test_confluent_residuals_vanish(m):
    r = residuals(m)
    assert max(abs(v) for v in r) < 1e-12


def test_r3_empty_interval():
    m = ModulationPoint(0.0, -1.0, -1.0, 2.5)
    assert residuals(m)[2] == 0.0


def test_r1_r2_permutation_invariant():
    b = (-4.1, 0.7, 5.2)
    base = residuals(ModulationPoint(0.1, *b))[:2]
    for perm in ((0.7, -4.1, 5.2), (5.2, 0.7, -4.1)):
        assert residuals(ModulationPoint(0.1, *perm))[:2] == pytest.approx(base, abs=1e-12)


@pytest.mark.parametrize("s, expected", [
    (S_LEFT, (-SQ3, -SQ3, 4 * SQ3)),
    (S_RIGHT, (-4 * SQ15 / 3, SQ15, SQ15)),
])
def test_endpoints_exact(s, expected):
    np.testing.assert_allclose(solve_modulation(s).betas, expected, atol=1e-9)


def test_outside_interval_rejected():
    with pytest.raises(DomainError):
        solve_modulation(1.0)


def _oracle_s0():
    """Independent solve at s = 0: coarse scan over (b3, b1) with b2 from r1."""
    s = 0.0

    def b2_from(b3, b1):
        # r1 = 0 is the quadratic 3 b2^2 + 2 (b3 + b1) b2 + c = 0
        c = (b3 + b1) ** 2 + 2 * (b3 * b3 + b1 * b1) - 120
        disc = (b3 + b1) ** 2 - 3 * c
        if disc < 0:
            return None
        return (-(b3 + b1) + math.sqrt(disc)) / 3

    def r3(b3, b2, b1):
        a = -(b3 + b2 + b1) / 2
        return sci_integrate.quad(lambda x: (x - a) * math.sqrt(b1 - x), b3, b2,
                                  weight="alg", wvar=(0.5, 0.5), epsabs=1e-13, epsrel=1e-12)[0]

    best = None
    for b3 in np.linspace(-8, -1, 71):
        for b1 in np.linspace(2, 8, 61):
            b2 = b2_from(b3, b1)
            if b2 is None or not b3 < b2 < b1:
                continue
            tot = b3 + b2 + b1
            r2 = tot ** 3 - 4 * (b3 ** 3 + b2 ** 3 + b1 ** 3) - 360 * s
            val = r2 ** 2 / 1e4 + r3(b3, b2, b1) ** 2
            if best is None or val < best[0]:
                best = (val, b3, b2, b1)

    def F(v):
        b3, b2, b1 = v
        tot = b3 + b2 + b1
        return [tot ** 2 + 2 * (b3 * b3 + b2 * b2 + b1 * b1) - 120,
                tot ** 3 - 4 * (b3 ** 3 + b2 ** 3 + b1 ** 3) - 360 * s,
                r3(b3, b2, b1)]

    sol = optimize.fsolve(F, best[1:], xtol=1e-14, full_output=True)
    return np.array(sol[0])


def test_s0_against_independent_oracle():
    m = solve_modulation(0.0)
    np.testing.assert_allclose(m.betas, _oracle_s0(), atol=1e-8)
    assert m.is_ordered(strict=True)


def test_tighter_quadrature_changes_little():
    m = solve_modulation(-1.3)
    tight = modulation._R3_SPEC.tightened(100.0)
    m2 = solve_modulation(-1.3, seed=m, spec=tight)
    np.testing.assert_allclose(m2.betas, m.betas, atol=1e-8)
    assert max(abs(v) for v in residuals(m, tight)) < 1e-9


def test_branches_from_both_ends_agree():
    assert modulation.branch_mismatch() < 1e-9


def test_sweep_endpoints_and_monotonicity():
    tr = continuation_sweep(S_LEFT, S_RIGHT, 50)
    assert len(tr) >= 50
    assert np.all(np.diff(tr.s) > 0)
    b = tr.betas()
    np.testing.assert_allclose(b[0], [-SQ3, -SQ3, 4 * SQ3], atol=1e-9)
    np.testing.assert_allclose(b[-1], [-4 * SQ15 / 3, SQ15, SQ15], atol=1e-9)
    # beta1 decreases and beta3 decreases along the sweep
    assert np.all(np.diff(b[:, 2]) < 0)
    assert np.all(np.diff(b[:, 0]) < 0)
    assert all(p.is_ordered(strict=True) for p in tr.points[1:-1])


def test_sweep_step_halving_agrees():
    coarse = continuation_sweep(-3.0, 0.2, 9)
    fine = continuation_sweep(-3.0, 0.2, 17)
    np.testing.assert_allclose(fine.betas()[::2], coarse.betas(), atol=1e-8)


def test_sweep_degenerate_and_deterministic():
    tr = continuation_sweep(-1.0, -1.0)
    assert len(tr) == 1
    a = continuation_sweep(-2.0, 0.0, 7).to_csv()
    b = continuation_sweep(-2.0, 0.0, 7).to_csv()
    assert a == b
    assert a.splitlines()[0] == "s,beta3,alpha,beta2,beta1,r1,r2,r3"
    assert "\r" not in a


def test_whitham_velocities_flag_confluence():
    v, singular = modulation.whitham_velocities((1.0, 1.0, 1.0))
    assert singular and np.all(np.isnan(v))


def test_whitham_scale_invariance():
    s, t, lam = -1.0, 1.5, 2.0
    r1, _, _ = modulation.whitham_pointwise(s, t, 0.01)
    r2, _, _ = modulation.whitham_pointwise(s, lam * t, 0.01)
    # beta_tilde scales like t^{1/2}, derivatives like t^{-1}
    np.testing.assert_allclose(r2, r1 * lam ** -0.5, rtol=1e-6, atol=1e-12)


def test_whitham_report_shape():
    tr = continuation_sweep(S_LEFT + 0.3, S_RIGHT - 0.05, 4)
    rep = modulation.whitham_residual(tr, [1.0, 2.0], steps=(0.02, 0.01))
    assert len(rep.residuals) == 2 and len(rep.orders) == 1
    assert all(np.isfinite(rep.residuals))
