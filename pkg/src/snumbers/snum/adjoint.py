"""s-numbers of the adjoint P*: Y* -> P(^m X), phi -> phi o P.

The domain ball of P* is the dual ball of Y; its extreme points are finite
for q in {1, inf} and replaced by an angular or sphere net (with a reported
covering factor) for q = 2.  Norms in the codomain are sups of scalar
polynomials over the unit ball of X, computed by nested certified sups.
"""

from __future__ import annotations

import math

import numpy as np

from ..certify import certified_sup_functionals
from ..monomials import monomials
from ..poly import HomPoly, poly_rank
from ..spaces import LpSpace
from ..values import DEFAULT_BUDGET, CertifiedValue, OptimizerBudget
from .numbers import (
    _trivial,
    approx_number,
    distance_sup,
    kolmogorov_number,
    residual_norm,
)
from .search import MAX_LP_ROWS, factor_rank, image_points, norming_functionals, random_factors, rank_minimax, subspace_search, x_net

ADJOINT_KINDS = ("approximation", "kolmogorov", "gelfand_kappa", "gelfand_linfty")


def _dual_ball_points(P: HomPoly) -> tuple[np.ndarray, float]:
    """Extreme points of the unit ball of Y* (modulo sign) and a covering factor."""
    return norming_functionals(P.codomain.p, P.codomain.dim)


def adjoint_norm_of(P: HomPoly, K: np.ndarray, budget: OptimizerBudget, seed: int = 0):
    """Certified sup over phi in B_{Y*} of |(P* - K^T) phi| in P(^m X).

    For q in {1, inf} this is a max of scalar polynomial norms over the
    finitely many extreme points; for q = 2 the nested sup over the dual
    sphere is swapped for the l_2 norm of the residual polynomial.
    """
    R = P.with_coeffs(P.coeffs - K)
    if not np.any(R.coeffs):
        return CertifiedValue.zero("exact fit"), np.zeros((0, P.domain.dim))
    if P.codomain.p == 2.0 or R.degree == 1:
        return residual_norm(P, K, budget, seed)
    Phi, _ = _dual_ball_points(P)
    sr = certified_sup_functionals(R.coeffs, R.degree, R.domain.p, Phi, budget=budget, dim=R.domain.dim)
    return CertifiedValue(sr.lo, sr.hi, True, True, "nested sup over dual extreme points", sr.converged), sr.points


def adjoint_approx(P: HomPoly, n: int, budget: OptimizerBudget = DEFAULT_BUDGET, seed: int = 0) -> CertifiedValue:
    """a_n(P*): best rank < n linear maps Y* -> P(^m X)."""
    t = _trivial(P, n, budget, seed)
    if t is not None:
        return t
    r = n - 1
    C, m = P.coeffs, P.degree
    k, D = C.shape
    A = C.T
    pts = x_net(P.domain, budget, seed)
    G = monomials(pts, m)                    # point evaluations norm P(^m X)
    Phi, _ = _dual_ball_points(P)
    E = Phi.T                                # extreme points of the domain ball
    rng = np.random.default_rng(seed)
    starts = [factor_rank(A, r)]
    a = approx_number(P, n, budget, seed)
    best_hi, best_lo, best_K, conv = math.inf, 0.0, None, True
    if isinstance(a.witness, np.ndarray) and a.witness.shape == C.shape:
        # transposes of rank < n approximants of P are feasible for P*
        starts.append(factor_rank(a.witness.T, r))
        cert, _ = adjoint_norm_of(P, a.witness, budget, seed)
        best_hi, best_lo, best_K, conv = cert.hi, cert.lo, a.witness.T, cert.converged
    for _ in range(max(0, budget.minimax_starts - 1)):
        starts.append(random_factors((D, k), r, rng, float(np.abs(C).max())))
    rounds = max(1, budget.exchange_rounds) if G.shape[0] * E.shape[1] <= MAX_LP_ROWS or best_K is None else 0
    for _ in range(rounds):
        res = rank_minimax(A, G, E, r, starts, budget.alt_iters)
        cert, arg = adjoint_norm_of(P, res.K.T, budget, seed)
        if cert.hi < best_hi:
            best_hi, best_lo, best_K, conv = cert.hi, min(res.value, cert.hi), res.K, cert.converged
        if cert.lo <= res.value * (1 + 1e-6) + 1e-12 or not len(arg):
            break
        G = np.vstack([G, monomials(arg, m)])
        starts = [(res.Y, res.Z)]
    return CertifiedValue(best_lo, best_hi, False, True, "adjoint minimax + nested certified sup", conv, witness=best_K)


def adjoint_kolmogorov(P: HomPoly, n: int, budget: OptimizerBudget = DEFAULT_BUDGET, seed: int = 0) -> CertifiedValue:
    """d_n(P*): subspaces W of P(^m X) of dimension < n.

    For each dual extreme point phi the best approximation of phi o P from W
    is a separate coefficient vector, so the discretised problem is a
    rank-r minimax for the matrix with columns C^T phi.
    """
    t = _trivial(P, n, budget, seed)
    if t is not None:
        return t
    r = n - 1
    C, m = P.coeffs, P.degree
    Phi, factor = _dual_ball_points(P)
    A = C.T @ Phi.T                          # column j: coefficients of phi_j o P
    D, M = A.shape
    pts = x_net(P.domain, budget, seed)
    G = monomials(pts, m)
    E = np.eye(M)
    rng = np.random.default_rng(seed)
    starts = [factor_rank(A, r)]
    a = approx_number(P, n, budget, seed)
    scalar = LpSpace(1, 2.0)

    def certify(K):
        worst, worst_lo, new_pts, ok = 0.0, 0.0, [], True
        for j in range(M):
            Pj = HomPoly(m, P.domain, scalar, A[:, j][None, :])
            cert, arg = residual_norm(Pj, K[:, j][None, :], budget, seed)
            ok = ok and cert.converged
            if cert.hi > worst:
                worst, worst_lo, new_pts = cert.hi, cert.lo, arg
        return worst * factor, worst_lo, new_pts, ok

    best_hi, best_lo, best_W, conv = math.inf, 0.0, None, True
    if isinstance(a.witness, np.ndarray) and a.witness.shape == C.shape:
        KA = a.witness.T @ Phi.T
        starts.append(factor_rank(KA, r))
        best_hi, best_lo, _, conv = certify(KA)
        best_W = factor_rank(KA, r)[0]
    for _ in range(max(0, budget.minimax_starts - 1)):
        starts.append(random_factors((D, M), r, rng, float(np.abs(A).max())))
    rounds = max(1, budget.exchange_rounds) if G.shape[0] * M <= MAX_LP_ROWS or best_W is None else 0
    for _ in range(rounds):
        res = rank_minimax(A, G, E, r, starts, budget.alt_iters)
        hi, worst_lo, new_pts, ok = certify(res.K)
        if hi < best_hi:
            best_hi, best_lo, best_W, conv = hi, min(res.value, hi), res.Y, ok
        best_lo = min(best_lo, best_hi)
        if worst_lo <= res.value * (1 + 1e-6) + 1e-12 or not len(new_pts):
            break
        G = np.vstack([G, monomials(new_pts, m)])
        starts = [(res.Y, res.Z)]
    note = "adjoint subspace minimax + nested certified sup"
    if factor != 1.0:
        note += f", dual-sphere net factor {factor:.6g}"
        # the range of a rank < n approximant of P* is a feasible subspace
        aA = adjoint_approx(P, n, budget, seed)
        if aA.hi < best_hi:
            best_hi, best_lo, conv = aA.hi, min(best_lo, aA.hi), aA.converged
            note += "; upper bound from the approximation candidate"
    return CertifiedValue(best_lo, best_hi, False, True, note, conv, witness=best_W)


def adjoint_gelfand(P: HomPoly, n: int, variant: str = "linfty", budget: OptimizerBudget = DEFAULT_BUDGET,
                    seed: int = 0, j_delta: float | None = None) -> CertifiedValue:
    """c_n(P*) through an embedding of P(^m X) into an l_inf space.

    kappa: the bidual embedding (identity in finite dimension), i.e. a_n(P*).
    linfty: evaluation at every unit vector is an isometric embedding into
    l_inf(S_X); composed with P* it sends phi to (phi(P(x)))_x, and a rank
    < n approximant amounts to a subspace N of Y, giving the value
    inf_N sup_x dist(P(x), N).  The subspace is searched on a fine
    evaluation net and the sup is certified by branch and bound.
    """
    if variant == "kappa":
        v = adjoint_approx(P, n, budget, seed)
        v.note = "bidual embedding is the identity; " + v.note
        return v
    if variant != "linfty":
        raise ValueError(f"unknown adjoint Gelfand variant {variant!r}")
    t = _trivial(P, n, budget, seed)
    if t is not None:
        return t
    r = n - 1
    C, m, q = P.coeffs, P.degree, P.codomain.p
    k = C.shape[0]
    d = P.domain.dim
    delta = j_delta if j_delta is not None else (0.005 if d <= 2 else 0.05)
    pts = x_net(P.domain, budget, seed + 1, delta=delta)
    V = image_points(C, pts, m)
    rng = np.random.default_rng(seed + 1)
    starts = [np.linalg.svd(V.T, full_matrices=False)[0][:, :r]]
    dv = kolmogorov_number(P, n, budget, seed)
    if isinstance(dv.witness, np.ndarray) and dv.witness.shape == (k, r):
        starts.append(dv.witness)
    starts += [rng.standard_normal((k, r)) for _ in range(max(0, budget.minimax_starts - 1))]
    res = subspace_search(V, r, q, starts, budget.max_iters)
    cert, _ = distance_sup(P, res.U, budget)
    return CertifiedValue(min(res.value, cert.hi), cert.hi, False, True,
                          f"evaluation embedding; subspace search on {len(pts)} points + certified sup",
                          cert.converged, witness=res.U)


def snumbers_of_adjoint(P: HomPoly, n: int, kind: str, budget: OptimizerBudget = DEFAULT_BUDGET,
                        seed: int = 0) -> CertifiedValue:
    if kind == "approximation":
        return adjoint_approx(P, n, budget, seed)
    if kind == "kolmogorov":
        return adjoint_kolmogorov(P, n, budget, seed)
    if kind in ("gelfand_kappa", "gelfand_linfty"):
        return adjoint_gelfand(P, n, kind.split("_", 1)[1], budget, seed)
    raise ValueError(f"unknown adjoint kind {kind!r}; expected one of {ADJOINT_KINDS}")


def adjoint_rank(P: HomPoly) -> int:
    return poly_rank(P)
