"""Asymptotics of the pole-free solution of the second Painleve I hierarchy equation.

The solution ``y(x, t)`` is evaluated in four regimes selected by
``s = x |t|**(-3/2)``: algebraic, elliptic (genus one), Painleve II edge
and soliton edge. See :func:`evaluate` for the dispatcher.
"""

from .core import EDGE_WIDTH, S_LEFT, S_RIGHT, ExpansionResult, Regime, ScalePoint, classify
from .errors import (
    BranchCutError,
    ConvergenceError,
    DegeneracyError,
    DomainError,
    InternalConsistencyError,
    Pi2Error,
    PoleError,
    RegimeError,
    ResolutionError,
    SolverError,
)
from .algebraic import y_algebraic, solve_z0
from .modulation import ModulationPoint, solve_modulation, continuation_sweep
from .elliptic import derive_elliptic, y_elliptic
from .critical import hastings_mcleod, y_edge_pii, y_edge_soliton
from .evaluate import evaluate

__version__ = "0.1.0"

__all__ = [
    "EDGE_WIDTH",
    "S_LEFT",
    "S_RIGHT",
    "ExpansionResult",
    "Regime",
    "ScalePoint",
    "classify",
    "evaluate",
    "y_algebraic",
    "solve_z0",
    "ModulationPoint",
    "solve_modulation",
    "continuation_sweep",
    "derive_elliptic",
    "y_elliptic",
    "hastings_mcleod",
    "y_edge_pii",
    "y_edge_soliton",
    "Pi2Error",
    "DomainError",
    "RegimeError",
    "BranchCutError",
    "PoleError",
    "DegeneracyError",
    "ConvergenceError",
    "SolverError",
    "ResolutionError",
    "InternalConsistencyError",
]
