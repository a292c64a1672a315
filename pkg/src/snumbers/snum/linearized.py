"""s-numbers of the linearization P_L: (sym tensors, pi_s) -> Y.

The unit ball of the symmetric projective tensor norm is the closed convex
hull of {+-delta(x): |x| = 1}, so norms of linear maps out of it are sups
over these atoms.  The search here is parametrised differently from the
polynomial side: Nelder-Mead over the range frame with an inner Chebyshev
LP for the coefficients, discretised on seeded random atoms rather than a
covering net.  Lower bounds of candidate norms are certified through the
pi_s norm of the witness tensors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ..monomials import monomials
from ..poly import HomPoly
from ..spaces import Vector, lp_norm, random_unit_vectors
from ..tensor import delta, pi_s_norm
from ..values import DEFAULT_BUDGET, CertifiedValue, OptimizerBudget
from .numbers import _trivial, distance_sup, residual_norm
from .search import chebyshev_lp, image_points, norming_functionals, orthonormal_frame, subspace_search, _simplex


@dataclass
class LinearizedResult:
    value: CertifiedValue
    K: np.ndarray | None = None
    witness_norms: list[CertifiedValue] = field(default_factory=list)

    @property
    def max_pi_gap(self) -> float:
        """Largest relative duality gap among the witness pi_s norms."""
        gaps = [w.gap / max(w.hi, 1e-300) for w in self.witness_norms]
        return max(gaps, default=0.0)


def _atoms(P: HomPoly, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed + 7919)
    X = random_unit_vectors(P.domain, count, rng)
    return np.vstack([np.eye(P.domain.dim), X])


def _witness_norms(P: HomPoly, K: np.ndarray, points: np.ndarray, budget: OptimizerBudget,
                   seed: int) -> list[CertifiedValue]:
    """Certified lower bounds |(P_L - K) u| / pi_s(u) at witness tensors u = delta(x)."""
    out = []
    R = P.coeffs - K
    for x in points[:2]:
        x = np.asarray(x, float) / float(lp_norm(np.asarray(x, float), P.domain.p))
        u = delta(Vector(P.domain, x), P.degree)
        pn, _ = pi_s_norm(u, budget, seed)
        num = float(lp_norm(R @ u.coords, P.codomain.p))
        out.append(CertifiedValue(num / pn.hi, num / max(pn.lo, 1e-300), True, False,
                                  f"pi_s({len(u.coords)}-dim witness) in [{pn.lo:.6g}, {pn.hi:.6g}]"))
    return out


def _coeff_fit(C: np.ndarray, U: np.ndarray, G: np.ndarray, Ea: np.ndarray) -> tuple[float, np.ndarray]:
    """min over W of max |g (C - U W) e| for g in G, e in the atom columns Ea."""
    a = (G @ C @ Ea).reshape(-1)
    GU = G @ U
    M = np.einsum("ib,jc->ijbc", GU, Ea.T).reshape(len(a), -1)
    val, w = chebyshev_lp(M, a)
    return val, w.reshape(U.shape[1], C.shape[1])


def linearized_approx(P: HomPoly, n: int, budget: OptimizerBudget = DEFAULT_BUDGET, seed: int = 0,
                      atoms: int = 120) -> LinearizedResult:
    """a_n(P_L) by a search over the range of the approximant."""
    t = _trivial(P, n, budget, seed)
    if t is not None:
        return LinearizedResult(t)
    r = n - 1
    C, m, q = P.coeffs, P.degree, P.codomain.p
    k = C.shape[0]
    X = _atoms(P, atoms, seed)
    Ea = monomials(X, m).T
    G, _ = norming_functionals(q, k, resolution=16)   # search only; the sup is certified below

    def fun(theta):
        U = theta.reshape(k, r)
        if np.linalg.matrix_rank(U, tol=1e-9) < r:
            return float(np.abs(G @ C @ Ea).max())
        return _coeff_fit(C, orthonormal_frame(U), G, Ea)[0]

    rng = np.random.default_rng(seed)
    U0s = [np.linalg.svd(C @ Ea, full_matrices=False)[0][:, :r]]
    U0s += [rng.standard_normal((k, r)) for _ in range(max(0, budget.minimax_starts - 1))]
    best = None
    for U0 in U0s:
        U0 = orthonormal_frame(U0)
        res = minimize(fun, U0.reshape(-1), method="Nelder-Mead",
                       options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": budget.max_iters * k * r,
                                "initial_simplex": _simplex(U0.reshape(-1))})
        if best is None or res.fun < best.fun:
            best = res
    U = orthonormal_frame(best.x.reshape(k, r))
    val, W = _coeff_fit(C, U, G, Ea)
    K = U @ W
    cert, pts = residual_norm(P, K, budget, seed)
    witness = _witness_norms(P, K, pts, budget, seed) if len(pts) else []
    v = CertifiedValue(min(val, cert.hi), cert.hi, False, True,
                       f"range search on {len(X)} random atoms + certified sup over extreme tensors",
                       cert.converged, witness=K)
    return LinearizedResult(v, K, witness)


def linearized_kolmogorov(P: HomPoly, n: int, budget: OptimizerBudget = DEFAULT_BUDGET, seed: int = 0,
                          atoms: int = 120) -> LinearizedResult:
    """d_n(P_L): the image of the pi_s ball is the absolute convex hull of P(S_X)."""
    t = _trivial(P, n, budget, seed)
    if t is not None:
        return LinearizedResult(t)
    r = n - 1
    C, m, q = P.coeffs, P.degree, P.codomain.p
    k = C.shape[0]
    X = _atoms(P, atoms, seed)
    V = image_points(C, X, m)
    rng = np.random.default_rng(seed)
    starts = [np.linalg.svd(V.T, full_matrices=False)[0][:, :r]]
    starts += [rng.standard_normal((k, r)) for _ in range(max(0, budget.minimax_starts - 1))]
    res = subspace_search(V, r, q, starts, budget.max_iters)
    cert, pts = distance_sup(P, res.U, budget)
    witness = []
    if len(pts):
        # the best approximation of one image from the subspace gives a concrete witness map
        witness = _witness_norms(P, res.U @ np.linalg.lstsq(res.U, C, rcond=None)[0], pts, budget, seed)
    v = CertifiedValue(min(res.value, cert.hi), cert.hi, False, True,
                       f"subspace search on {len(X)} random atoms + certified sup", cert.converged, witness=res.U)
    return LinearizedResult(v, res.U, witness)


def linearized_number(P: HomPoly, n: int, kind: str, budget: OptimizerBudget = DEFAULT_BUDGET,
                      seed: int = 0) -> LinearizedResult:
    if kind == "approximation":
        return linearized_approx(P, n, budget, seed)
    if kind == "kolmogorov":
        return linearized_kolmogorov(P, n, budget, seed)
    raise ValueError(f"linearized s-numbers support approximation and kolmogorov, not {kind!r}")
