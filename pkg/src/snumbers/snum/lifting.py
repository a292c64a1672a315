"""Composition with finite l_1 lifts Q_N: l_1^N -> X, e_i -> x_i.

For a subspace N of Y of dimension < n and a linear projection Pi onto N,
K = Pi o P o Q_N is an m-homogeneous polynomial of rank < n on l_1^N, so

    a_n(P o Q_N) <= sup_{y in B(l_1^N)} |(I - Pi) P(Q_N y)|
                 =  sup_{x in conv(+-x_i)} |(I - Pi) P(x)|.

The right side is certified by branch and bound over the boundary of the
polygon conv(+-x_i) (domain dimension 2).  Taking N from the Kolmogorov
search makes the bound approach d_n(P) as the atoms fill the sphere.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull

from ..certify import certified_sup, polygon_patches
from ..monomials import substitution_matrix
from ..poly import HomPoly, poly_norm
from ..spaces import FiniteL1Lift, LpSpace, dual_exponent, make_l1_lift
from ..values import DEFAULT_BUDGET, CertifiedValue, OptimizerBudget
from .numbers import _extreme_points, kolmogorov_number, projection_along
from .search import image_points, subspace_search

DEFAULT_LIFT_SIZES = (8, 16, 32, 64)


def compose_with_l1_lift(P: HomPoly, lift: FiniteL1Lift) -> HomPoly:
    """The polynomial P o Q_N on l_1^N (coefficients in the canonical monomial order)."""
    if lift.target != P.domain:
        raise ValueError("lift target must be the domain of P")
    L = substitution_matrix(lift.matrix, P.degree)
    return HomPoly(P.degree, lift.domain, P.codomain, P.coeffs @ L)


def _hull_vertices(atoms: np.ndarray) -> np.ndarray:
    pts = np.vstack([atoms, -atoms])
    hull = ConvexHull(pts)
    return pts[hull.vertices]          # counter-clockwise in two dimensions


def hull_sup(coeffs: np.ndarray, degree: int, p: float, q: float, atoms: np.ndarray,
             budget: OptimizerBudget = DEFAULT_BUDGET) -> CertifiedValue:
    """Certified sup of |R(x)|_q over conv(+-atoms) in the plane."""
    if atoms.shape[1] != 2:
        raise ValueError("hull sups are implemented for two-dimensional domains")
    if not np.any(coeffs):
        return CertifiedValue.zero("zero residual")
    patches = polygon_patches(_hull_vertices(atoms))
    k = coeffs.shape[0]
    if q == 2.0 or k == 1:
        runs = [certified_sup(coeffs, degree, p, q, patches=patches, budget=budget, dim=2)]
    else:
        # polyhedral codomain norm: max over the extreme points of the dual ball
        G = _extreme_points(LpSpace(k, dual_exponent(q)))
        runs = [certified_sup((g @ coeffs)[None, :], degree, p, 2.0, patches=patches, budget=budget, dim=2)
                for g in G]
    lo = max(r.lo for r in runs)
    hi = max(r.hi for r in runs)
    return CertifiedValue(lo, hi, True, True, "branch-and-bound over the hull boundary",
                          all(r.converged for r in runs))


@dataclass
class LiftResult:
    size: int
    value: CertifiedValue
    runtime_ms: float


@dataclass
class LiftingTrend:
    kolmogorov: CertifiedValue
    norm: CertifiedValue
    n: int
    results: list[LiftResult] = field(default_factory=list)

    def gap_at(self, size: int) -> float:
        """d_n(P).hi - a_n(P o Q_size).hi."""
        for r in self.results:
            if r.size == size:
                return self.kolmogorov.hi - r.value.hi
        raise KeyError(size)


def lifted_approx(P: HomPoly, n: int, lift: FiniteL1Lift, budget: OptimizerBudget = DEFAULT_BUDGET,
                  seed: int = 0, subspace: np.ndarray | None = None) -> CertifiedValue:
    """Certified upper bound for a_n(P o Q_N); lo is a discretised subspace value."""
    if n < 1:
        raise ValueError("n must be positive")
    C, m, q = P.coeffs, P.degree, P.codomain.p
    k = C.shape[0]
    r = n - 1
    if r == 0:
        v = hull_sup(C, m, P.domain.p, q, lift.atoms, budget)
        v.note = "n = 1: norm of P o Q_N"
        return v
    if r >= k or np.linalg.matrix_rank(C, tol=1e-10) <= r:
        return CertifiedValue.zero("rank(P o Q_N) < n")
    if subspace is None:
        d = kolmogorov_number(P, n, budget, seed)
        subspace = d.witness
    Pi = projection_along(subspace, q)
    R = C - Pi @ C
    hi = hull_sup(R, m, P.domain.p, q, lift.atoms, budget)
    # discretised lower estimate: best subspace for the images of the atoms
    V = image_points(C, lift.atoms, m)
    lo = subspace_search(V, r, q, [subspace], budget.max_iters).value
    return CertifiedValue(min(lo, hi.hi), hi.hi, False, True,
                          f"projection onto the Kolmogorov subspace, {lift.size} atoms", hi.converged,
                          witness=Pi)


def lifting_trend(P: HomPoly, n: int, sizes=DEFAULT_LIFT_SIZES, budget: OptimizerBudget = DEFAULT_BUDGET,
                  seed: int = 0) -> LiftingTrend:
    d = kolmogorov_number(P, n, budget, seed)
    trend = LiftingTrend(d, poly_norm(P, budget, seed, strict=False), n)
    U = d.witness if isinstance(d.witness, np.ndarray) else None
    for N in sizes:
        t0 = time.perf_counter()
        lift = make_l1_lift(P.domain, N, seed)
        v = lifted_approx(P, n, lift, budget, seed, subspace=U)
        trend.results.append(LiftResult(N, v, (time.perf_counter() - t0) * 1e3))
    return trend
