"""Regime dispatch for pointwise evaluation of ``y``."""

from .algebraic import y_algebraic
from .core import EDGE_WIDTH, Regime, ScalePoint, classify
from .critical import hastings_mcleod, xi_from_x_pii, xi_from_x_soliton, y_edge_pii, y_edge_soliton
from .elliptic import y_elliptic


def evaluate(x, t, edge_width=EDGE_WIDTH, hm=None):
    """Evaluate ``y(x, t)`` with the expansion of the regime ``(x, t)`` falls in.

    Edge regimes convert ``x`` to the edge variable ``xi``; the
    Hastings-McLeod profile is built on first use unless ``hm`` is given.
    """
    p = ScalePoint.from_xt(x, t)
    regime = classify(p, edge_width)
    if regime in (Regime.ALGEBRAIC_NEG_T, Regime.ALGEBRAIC_POS_T):
        return y_algebraic(p)
    if regime is Regime.ELLIPTIC:
        return y_elliptic(p)
    if regime is Regime.EDGE_PII:
        hm = hastings_mcleod() if hm is None else hm
        return y_edge_pii(xi_from_x_pii(p.x, p.t), p.t, hm)
    return y_edge_soliton(xi_from_x_soliton(p.x, p.t), p.t)
