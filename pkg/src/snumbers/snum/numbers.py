"""Approximation, Kolmogorov and Gelfand numbers of homogeneous polynomials.

Every value is an interval.  The upper endpoint is always certified: it is
the certified sup of a feasible candidate (a rank < n polynomial, a
subspace of dimension < n, a subspace of finite codimension).  The lower
endpoint is the discretised objective of that candidate and is heuristic.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import null_space

from ..certify import certified_sup_functionals
from ..monomials import monomials
from ..poly import HomPoly, linear_norm, poly_norm, poly_rank, sup_result
from ..spaces import (
    LpSpace,
    dual_exponent,
    dual_maximizer,
    lp_norm,
    nearest_in_subspace,
    section_vertices,
)
from ..values import DEFAULT_BUDGET, CertifiedValue, OptimizerBudget
from .search import (
    MAX_LP_ROWS,
    factor_rank,
    image_points,
    norming_functionals,
    orthonormal_frame,
    random_factors,
    rank_minimax,
    subspace_search,
    x_net,
)

KINDS = ("approximation", "kolmogorov", "gelfand_kappa", "gelfand_linfty", "gelfand_subspace")
GELFAND_VARIANTS = ("kappa", "linfty", "subspace")
SUBSPACE_START_MAX_DIM = 3


class UnsupportedVariant(ValueError):
    pass


def _check_n(n: int):
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")


def _trivial(P: HomPoly, n: int, budget: OptimizerBudget, seed: int) -> CertifiedValue | None:
    _check_n(n)
    if P.is_zero():
        return CertifiedValue.zero("zero polynomial")
    if n == 1:
        v = poly_norm(P, budget, seed, strict=False)
        v.note = "n = 1: the norm"
        return v
    if poly_rank(P) <= n - 1:
        return CertifiedValue.zero("rank(P) < n")
    return None


def _key(P: HomPoly) -> tuple:
    return (P.degree, P.domain, P.codomain, P.coeffs.shape, P.coeffs.tobytes())


# --- certified sups of candidates --------------------------------------------

def residual_norm(P: HomPoly, K: np.ndarray, budget: OptimizerBudget, seed: int = 0):
    """Certified sup of |(P - K)(x)| and the near-maximisers found."""
    R = P.with_coeffs(P.coeffs - K)
    if not np.any(R.coeffs):
        return CertifiedValue.zero("exact fit"), np.zeros((0, P.domain.dim))
    if R.degree == 1:
        v, x = linear_norm(R.coeffs, R.domain.p, R.codomain.p)
        return CertifiedValue.exact(v, "exact linear norm"), x[None, :]
    sr = sup_result(R, budget, seed)
    return CertifiedValue(sr.lo, sr.hi, True, True, "branch-and-bound sup", sr.converged), sr.points


def _extreme_points(space: LpSpace) -> np.ndarray | None:
    """Extreme points of the unit ball modulo sign, when finitely many."""
    from ..poly import _sign_vectors

    if space.p == 1.0:
        return np.eye(space.dim)
    if space.p == math.inf:
        return _sign_vectors(space.dim)
    return None


def distance_sup(P: HomPoly, U: np.ndarray, budget: OptimizerBudget, seed_points=None):
    """Certified sup over the unit ball of dist_q(P(x), span U)."""
    q = P.codomain.p
    U = orthonormal_frame(U) if U.shape[1] else U
    if q == 2.0:
        R = P.coeffs - U @ (U.T @ P.coeffs)
        return residual_norm(P, P.coeffs - R, budget)
    # dist_q(y, N) = max |g.y| over vertices g of the dual ball cut by N's annihilator
    G = section_vertices(U.T, dual_exponent(q)) if U.shape[1] else None
    if G is None:
        return residual_norm(P, np.zeros_like(P.coeffs), budget)
    ext = _extreme_points(P.domain)
    if P.degree == 1 and ext is not None:
        # convex in x: attained at an extreme point
        vals = np.abs(image_points(P.coeffs, ext, 1) @ G.T).max(axis=1)
        v = float(vals.max())
        return CertifiedValue.exact(v, "extreme points"), ext[[int(np.argmax(vals))]]
    sr = certified_sup_functionals(P.coeffs, P.degree, P.domain.p, G, budget=budget,
                                   seed_points=seed_points, dim=P.domain.dim)
    return CertifiedValue(sr.lo, sr.hi, True, True, "branch-and-bound sup", sr.converged), sr.points


# --- Kolmogorov numbers ------------------------------------------------------

@dataclass
class SubspaceCandidate:
    U: np.ndarray
    value: CertifiedValue


@lru_cache(maxsize=256)
def _kolmogorov_cached(key, r: int, budget: OptimizerBudget, seed: int) -> SubspaceCandidate:
    m, X, Y, shape, raw = key
    P = HomPoly(m, X, Y, np.frombuffer(raw).reshape(shape))
    return _kolmogorov_search(P, r, budget, seed)


def _kolmogorov_search(P: HomPoly, r: int, budget: OptimizerBudget, seed: int) -> SubspaceCandidate:
    C, m, q = P.coeffs, P.degree, P.codomain.p
    k = C.shape[0]
    pts = x_net(P.domain, budget, seed)
    V = image_points(C, pts, m)
    rng = np.random.default_rng(seed)
    starts = [np.linalg.svd(V.T, full_matrices=False)[0][:, :r],
              np.linalg.svd(C, full_matrices=False)[0][:, :r]]
    starts += [rng.standard_normal((k, r)) for _ in range(max(0, budget.minimax_starts - 1))]
    best: SubspaceCandidate | None = None
    for _ in range(max(1, budget.exchange_rounds)):
        res = subspace_search(V, r, q, starts, budget.max_iters)
        worst = pts[[int(np.argmax(nearest_in_subspace(V, res.U, q)[0]))]]
        cert, arg = distance_sup(P, res.U, budget, seed_points=worst)
        val = CertifiedValue(min(res.value, cert.hi), cert.hi, False, True,
                             "subspace search + certified sup", cert.converged, witness=res.U)
        if best is None or val.hi < best.value.hi:
            best = SubspaceCandidate(res.U, val)
        if cert.lo <= res.value * (1 + 1e-6) + 1e-12 or not len(arg):
            break
        pts = np.vstack([pts, arg])
        V = np.vstack([V, image_points(C, arg, m)])
        starts = [res.U]
    return best


def kolmogorov_number(P: HomPoly, n: int, budget: OptimizerBudget = DEFAULT_BUDGET,
                      seed: int = 0) -> CertifiedValue:
    """Interval for the n-th Kolmogorov number of P."""
    t = _trivial(P, n, budget, seed)
    if t is not None:
        return t
    cand = _kolmogorov_cached(_key(P), n - 1, budget, seed)
    v = cand.value
    return CertifiedValue(v.lo, v.hi, v.lo_certified, v.hi_certified, v.note, v.converged, witness=cand.U)


# --- approximation numbers ----------------------------------------------------

def projection_along(U: np.ndarray, q: float) -> np.ndarray:
    """A projection onto span U; norm-optimal complement when q = 2 or codim 1."""
    k, r = U.shape
    U = orthonormal_frame(U)
    if q == 2.0 or r != k - 1:
        return U @ U.T
    t = null_space(U.T)[:, 0]
    w = dual_maximizer(t[None, :], dual_exponent(q))[0]  # |w|_q = 1, t.w = |t|_q'
    u = w / float(t @ w)
    return np.eye(k) - np.outer(u, t)


def approx_number(P: HomPoly, n: int, budget: OptimizerBudget = DEFAULT_BUDGET, seed: int = 0,
                  hints: tuple = ()) -> CertifiedValue:
    """Interval for the n-th approximation number of P.

    ``hints`` are extra candidate coefficient matrices (any rank; they are
    truncated to rank n - 1).
    """
    t = _trivial(P, n, budget, seed)
    if t is not None:
        return t
    cand = _approx_cached(_key(P), n - 1, budget, seed) if not hints else \
        _approx_search(P, n - 1, budget, seed, hints)
    return cand


@lru_cache(maxsize=256)
def _approx_cached(key, r: int, budget: OptimizerBudget, seed: int) -> CertifiedValue:
    m, X, Y, shape, raw = key
    P = HomPoly(m, X, Y, np.frombuffer(raw).reshape(shape))
    return _approx_search(P, r, budget, seed, ())


def _approx_search(P: HomPoly, r: int, budget: OptimizerBudget, seed: int, hints) -> CertifiedValue:
    C, m, q = P.coeffs, P.degree, P.codomain.p
    k, D = C.shape
    pts = x_net(P.domain, budget, seed)
    E = monomials(pts, m).T
    G, _ = norming_functionals(q, k)
    rng = np.random.default_rng(seed)

    starts = [factor_rank(C, r)]
    starts += [factor_rank(np.asarray(H, float), r) for H in hints]
    scale = float(np.abs(C).max())
    for _ in range(max(0, budget.minimax_starts - 1)):
        starts.append(random_factors((k, D), r, rng, scale))

    best_hi, best_K, best_lo, conv = math.inf, None, 0.0, True
    if q == 2.0 or r == k - 1:
        # projecting onto the best subspace along a norm-one complement is
        # optimal here, so seed (and possibly finish) with it
        sub = _kolmogorov_cached(_key(P), r, budget, seed)
        proj_K = projection_along(sub.U, q) @ C
        cert, _ = residual_norm(P, proj_K, budget, seed)
        best_hi, best_K, conv = cert.hi, proj_K, cert.converged
        best_lo = min(cert.lo, float(np.abs(G @ (C - proj_K) @ E).max()))
        starts.insert(1, factor_rank(proj_K, r))
    elif 0 < r and k <= SUBSPACE_START_MAX_DIM:
        # the best subspace is a good range; the first LP step then fits the coefficients
        # (the subspace search is cheap only in small codomains)
        sub = _kolmogorov_cached(_key(P), r, budget, seed)
        starts.insert(1, (sub.U, np.linalg.lstsq(sub.U, C, rcond=None)[0]))

    # for Hilbert codomains the orthogonal projection attains the distance,
    # so no linear map beats the best subspace; skip the minimax search
    rounds = 0 if q == 2.0 else max(1, budget.exchange_rounds)
    for _ in range(rounds):
        res = rank_minimax(C, G, E, r, starts, budget.alt_iters)
        cert, arg = residual_norm(P, res.K, budget, seed)
        if cert.hi < best_hi:
            best_hi, best_K, conv = cert.hi, res.K, cert.converged
            best_lo = min(res.value, cert.hi)
        if cert.lo <= res.value * (1 + 1e-6) + 1e-12 or not len(arg):
            break
        E = np.hstack([E, monomials(arg, m).T])
        starts = [(res.Y, res.Z)]
    return CertifiedValue(min(best_lo, best_hi), best_hi, False, True,
                          "alternating minimax + certified sup", conv, witness=best_K)


# --- Gelfand numbers ------------------------------------------------------------

def injection_matrix(P: HomPoly, resolution: int = 32) -> np.ndarray:
    return norming_functionals(P.codomain.p, P.codomain.dim, resolution)[0]


def injection(P: HomPoly, resolution: int = 32) -> tuple[HomPoly, float]:
    """J o P with J: Y -> l_inf^M, y -> (g(y))_g over norming functionals.

    Returns the composed polynomial and the factor c >= 1 with |y| <= c |Jy|.
    """
    G, factor = norming_functionals(P.codomain.p, P.codomain.dim, resolution)
    JP = HomPoly(P.degree, P.domain, LpSpace(G.shape[0], math.inf), G @ P.coeffs)
    return JP, factor


def restricted_norm(T: np.ndarray, F: np.ndarray, p: float, q: float) -> float:
    """Exact norm of T restricted to ker F (F has r rows), from l_p^d to l_q."""
    d = T.shape[1]
    r = F.shape[0]
    if r == 0:
        return linear_norm(T, p, q)[0]
    if p == 2.0:
        B = null_space(F)
        return linear_norm(T @ B, 2.0, q)[0] if B.shape[1] else 0.0
    X = section_vertices(F, p)
    if not len(X):
        return 0.0
    return float(lp_norm(X @ T.T, q).max())


def gelfand_subspace(P: HomPoly, n: int, budget: OptimizerBudget = DEFAULT_BUDGET, seed: int = 0) -> CertifiedValue:
    """inf over codim < n subspaces M of |T restricted to M| for linear T."""
    if P.degree != 1:
        raise UnsupportedVariant("the subspace Gelfand variant needs a linear map (m = 1)")
    t = _trivial(P, n, budget, seed)
    if t is not None:
        return t
    from scipy.optimize import minimize

    T, p, q = P.coeffs, P.domain.p, P.codomain.p
    d = T.shape[1]
    r = n - 1
    if r >= d:
        return CertifiedValue.zero("codimension covers the domain")
    rng = np.random.default_rng(seed)
    starts = [np.linalg.svd(T)[2][:r]]
    starts += [rng.standard_normal((r, d)) for _ in range(max(0, budget.minimax_starts - 1))]

    def fun(theta):
        F = theta.reshape(r, d)
        if np.linalg.matrix_rank(F, tol=1e-9) < r:
            return linear_norm(T, p, q)[0]
        return restricted_norm(T, F, p, q)

    best, best_F = math.inf, None
    for F0 in starts:
        F0 = np.linalg.qr(F0.T)[0].T
        res = minimize(fun, F0.reshape(-1), method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": budget.max_iters * r * d})
        val = fun(res.x)
        if val < best:
            best, best_F = val, res.x.reshape(r, d)
    return CertifiedValue(best, best, False, True, "kernel search, exact restricted norm", witness=best_F)


def gelfand_number(P: HomPoly, n: int, variant: str = "kappa", budget: OptimizerBudget = DEFAULT_BUDGET,
                   seed: int = 0) -> CertifiedValue:
    """Interval for the n-th Gelfand number of P in the requested variant.

    kappa: composition with the canonical embedding into the bidual, which
    in finite dimension is an isometric re-indexing; the value is the
    approximation number.  linfty: composition with an embedding of Y into
    an l_inf space through norming functionals.  subspace: restriction to
    finite-codimensional subspaces (linear maps only).
    """
    if variant not in GELFAND_VARIANTS:
        raise UnsupportedVariant(f"unknown Gelfand variant {variant!r}")
    if variant == "subspace":
        return gelfand_subspace(P, n, budget, seed)
    if variant == "kappa":
        v = approx_number(P, n, budget, seed)
        return CertifiedValue(v.lo, v.hi, v.lo_certified, v.hi_certified,
                              "bidual embedding is the identity; " + v.note, v.converged, v.witness)
    JP, factor = injection(P)
    # J o K is feasible for J o P whenever K is feasible for P
    a = approx_number(P, n, budget, seed)
    if JP.codomain.dim * len(x_net(P.domain, budget, seed)) > MAX_LP_ROWS:
        # too many functionals for the minimax LP: the approximation candidate
        # bounds the value above, a coarse functional net estimates it below
        G, _ = norming_functionals(P.codomain.p, P.codomain.dim, 8, delta=0.6)
        cheap = budget.with_(minimax_starts=1, exchange_rounds=1, net_delta=max(budget.delta_for(P.domain.dim), 0.3))
        coarse = approx_number(HomPoly(P.degree, P.domain, LpSpace(G.shape[0], math.inf), G @ P.coeffs),
                               n, cheap, seed)
        note = f"{JP.codomain.dim} functionals exceed the LP size; coarse net lower estimate"
        return CertifiedValue(min(coarse.lo, a.hi), a.hi, False, a.hi_certified, note, a.converged, a.witness)
    usable = isinstance(a.witness, np.ndarray) and a.witness.shape == P.coeffs.shape
    hints = (injection_matrix(P) @ a.witness,) if usable else ()
    v = approx_number(JP, n, budget, seed, hints=hints)
    note = f"l_inf embedding over {JP.codomain.dim} functionals, injection factor {factor:.6g}"
    # bounds for the exact embedding into l_inf(B_Y*): the net value is below it,
    # factor * net value is above it, and so is |P - K| for any feasible K of P
    hi = v.hi * factor
    if a.hi < hi:
        hi = a.hi
        note += "; upper bound from the approximation candidate"
    return CertifiedValue(v.lo, hi, v.lo_certified, v.hi_certified, note, v.converged, v.witness)


# --- sequences ------------------------------------------------------------------

@dataclass
class SNumberResult:
    kind: str
    values: dict[int, CertifiedValue]
    seed: int = 0
    net_delta: float | None = None
    starts: int = 0
    runtime_ms: dict[int, float] = field(default_factory=dict)
    cummin_applied: list[int] = field(default_factory=list)

    def __getitem__(self, n: int) -> CertifiedValue:
        return self.values[n]

    @property
    def n_max(self) -> int:
        return max(self.values)


def clear_caches():
    """Drop memoised searches (used to check that re-runs recompute identical values)."""
    _kolmogorov_cached.cache_clear()
    _approx_cached.cache_clear()


def s_number(P: HomPoly, n: int, kind: str, budget: OptimizerBudget = DEFAULT_BUDGET, seed: int = 0) -> CertifiedValue:
    if kind == "approximation":
        return approx_number(P, n, budget, seed)
    if kind == "kolmogorov":
        return kolmogorov_number(P, n, budget, seed)
    if kind.startswith("gelfand_"):
        return gelfand_number(P, n, kind.split("_", 1)[1], budget, seed)
    raise ValueError(f"unknown kind {kind!r}; expected one of {KINDS}")


def s_numbers(P: HomPoly, kind: str, n_max: int, budget: OptimizerBudget = DEFAULT_BUDGET,
              seed: int = 0, func=None, cummin: bool = True) -> SNumberResult:
    """Values for n = 1..n_max; upper endpoints are made nonincreasing by cummin.

    ``func(P, n, kind, budget, seed)`` replaces the per-n computation (used
    by negative controls).
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    func = func or s_number
    out = SNumberResult(kind, {}, seed, budget.delta_for(P.domain.dim), budget.starts)
    for n in range(1, n_max + 1):
        t0 = time.perf_counter()
        out.values[n] = func(P, n, kind, budget, seed)
        out.runtime_ms[n] = 1e3 * (time.perf_counter() - t0)
    return apply_cummin(out) if cummin else out


def apply_cummin(res: SNumberResult) -> SNumberResult:
    """Enforce hi(n+1) <= hi(n) (a larger-n candidate bound is valid for smaller n's)."""
    prev = math.inf
    for n in sorted(res.values):
        v = res.values[n]
        if v.hi > prev + 1e-9:
            res.values[n] = CertifiedValue(min(v.lo, prev), prev, v.lo_certified, v.hi_certified,
                                           v.note + "; cummin", v.converged, v.witness)
            res.cummin_applied.append(n)
        prev = min(prev, res.values[n].hi)
    return res
