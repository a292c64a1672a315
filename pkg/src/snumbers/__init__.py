"""Certified s-numbers of homogeneous polynomials between finite-dimensional l_p spaces."""

from .poly import HomPoly, LinearMap, adjoint, compose, evaluate, poly_norm, poly_rank, polarize
from .spaces import LpSpace, Subspace, Vector
from .values import BudgetExhausted, CertifiedValue, OptimizerBudget

__version__ = "0.1.0"

__all__ = [
    "BudgetExhausted",
    "CertifiedValue",
    "HomPoly",
    "LinearMap",
    "LpSpace",
    "OptimizerBudget",
    "Subspace",
    "Vector",
    "adjoint",
    "compose",
    "evaluate",
    "poly_norm",
    "poly_rank",
    "polarize",
]
