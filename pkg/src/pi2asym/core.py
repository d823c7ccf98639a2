"""Shared coordinates, regime labels and result containers."""

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import DomainError

__all__ = [
    "S_LEFT",
    "S_RIGHT",
    "EDGE_WIDTH",
    "ScalePoint",
    "Regime",
    "ExpansionResult",
    "classify",
]

#: left end of the oscillatory interval, ``-2 sqrt(3)``
S_LEFT = -2.0 * math.sqrt(3.0)
#: right end of the oscillatory interval, ``2 sqrt(15) / 27``
S_RIGHT = 2.0 * math.sqrt(15.0) / 27.0
#: default half-width (in ``s``) of the two edge bands
EDGE_WIDTH = 0.05


@dataclass(frozen=True)
class ScalePoint:
    """A point ``(x, t)`` together with its self-similar variable.

    ``s = x |t|**(-3/2)``. Build with :meth:`from_xt` or :meth:`from_st`
    so the three numbers stay consistent.
    """

    x: float
    t: float
    s: float

    def __post_init__(self):
        if self.t == 0.0:
            raise DomainError("t = 0 has no self-similar variable")
        if not all(math.isfinite(v) for v in (self.x, self.t, self.s)):
            raise DomainError("ScalePoint coordinates must be finite")
        ref = self.x * abs(self.t) ** -1.5
        if abs(ref - self.s) > 1e-12 * max(1.0, abs(self.s)):
            raise DomainError(f"inconsistent ScalePoint: x|t|^(-3/2) = {ref!r}, s = {self.s!r}")

    @classmethod
    def from_xt(cls, x, t):
        x, t = float(x), float(t)
        if t == 0.0:
            raise DomainError("t = 0 has no self-similar variable")
        return cls(x, t, x * abs(t) ** -1.5)

    @classmethod
    def from_st(cls, s, t):
        s, t = float(s), float(t)
        if t == 0.0:
            raise DomainError("t = 0 has no self-similar variable")
        return cls(s * abs(t) ** 1.5, t, s)

    @property
    def sign_t(self):
        return 1 if self.t > 0 else -1


class Regime(str, Enum):
    ALGEBRAIC_NEG_T = "AlgebraicNegT"
    ALGEBRAIC_POS_T = "AlgebraicPosT"
    ELLIPTIC = "Elliptic"
    EDGE_PII = "EdgePII"
    EDGE_SOLITON = "EdgeSoliton"

    def __str__(self):
        return self.value


def classify(p, edge_width=EDGE_WIDTH):
    """Asymptotic regime of a point.

    ``t < 0`` is always algebraic. For ``t > 0`` the closed bands
    ``|s - S_LEFT| <= edge_width`` and ``|s - S_RIGHT| <= edge_width``
    take precedence; between them lies the elliptic region and outside
    the algebraic one.
    """
    if p.t == 0.0:
        raise DomainError("classify needs t != 0")
    if not edge_width >= 0.0:
        raise DomainError("edge_width must be non-negative")
    if p.t < 0.0:
        return Regime.ALGEBRAIC_NEG_T
    s = p.s
    if abs(s - S_LEFT) <= edge_width:
        return Regime.EDGE_PII
    if abs(s - S_RIGHT) <= edge_width:
        return Regime.EDGE_SOLITON
    if S_LEFT < s < S_RIGHT:
        return Regime.ELLIPTIC
    return Regime.ALGEBRAIC_POS_T


@dataclass(frozen=True)
class ExpansionResult:
    """Asymptotic evaluation of ``y``.

    ``error_order`` is a text tag such as ``"t^-1/2"``; ``details`` holds
    regime-specific diagnostics (k_max, form gap, flags).
    """

    leading: float
    correction: float
    error_order: str
    regime: Regime
    details: dict = field(default_factory=dict)

    @property
    def value(self):
        return self.leading + self.correction

    def as_dict(self):
        return {
            "leading": self.leading,
            "correction": self.correction,
            "value": self.value,
            "error_order": self.error_order,
            "regime": str(self.regime),
        }
