"""m-homogeneous polynomial maps between l_p spaces.

Coefficients are stored per output coordinate in the monomial basis without
multinomial weights: ``P(x)_j = sum_alpha c[j, alpha] x^alpha``.  With this
convention the linearization on the symmetric tensor power is literally the
coefficient matrix.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .certify import SupResult, certified_sup, certified_sup_functionals
from .monomials import (
    derivative_tensor,
    index_lookup,
    monomials,
    multi_indices,
    num_monomials,
    substitution_matrix,
)
from .spaces import DEFAULT_MAX_DEGREE, DimensionError, LpSpace, Vector, dual_maximizer, lp_norm
from .values import DEFAULT_BUDGET, BudgetExhausted, CertifiedValue, OptimizerBudget

RANK_TOL = 1e-10


# --- linear maps ------------------------------------------------------------

def _sign_vectors(n: int) -> np.ndarray:
    if n > 16:
        raise DimensionError("sign-vector enumeration limited to 16 coordinates")
    if n == 0:
        return np.zeros((1, 0))
    rest = np.array(list(itertools.product((1.0, -1.0), repeat=n - 1))).reshape(2 ** (n - 1), n - 1)
    return np.hstack([np.ones((len(rest), 1)), rest])


def linear_norm(M: np.ndarray, p: float, q: float) -> tuple[float, np.ndarray]:
    """Exact norm of M: l_p -> l_q for p, q in {1, 2, inf}, with a maximiser."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    k, d = M.shape
    if not M.any():
        return 0.0, np.eye(d)[0]
    if p == 1.0:
        vals = lp_norm(M.T, q)
        i = int(np.argmax(vals))
        return float(vals[i]), np.eye(d)[i]
    if p == math.inf:
        S = _sign_vectors(d)
        vals = lp_norm(S @ M.T, q)
        i = int(np.argmax(vals))
        return float(vals[i]), S[i]
    # p == 2
    if q == 2.0:
        _, s, vt = np.linalg.svd(M)
        return float(s[0]), vt[0]
    if q == math.inf:
        vals = lp_norm(M, 2.0)
        j = int(np.argmax(vals))
        return float(vals[j]), M[j] / vals[j]
    S = _sign_vectors(k)
    W = S @ M
    vals = lp_norm(W, 2.0)
    i = int(np.argmax(vals))
    return float(vals[i]), W[i] / vals[i]


@dataclass(frozen=True)
class LinearMap:
    domain: LpSpace
    codomain: LpSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        if m.shape != (self.codomain.dim, self.domain.dim):
            raise DimensionError(f"matrix shape {m.shape} does not match {self.codomain} <- {self.domain}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, space: LpSpace) -> "LinearMap":
        return cls(space, space, np.eye(space.dim))

    def __call__(self, x):
        coords = x.coords if isinstance(x, Vector) else np.asarray(x, dtype=float)
        return coords @ self.matrix.T

    def norm(self) -> float:
        return linear_norm(self.matrix, self.domain.p, self.codomain.p)[0]

    def norm_value(self) -> CertifiedValue:
        return CertifiedValue.exact(self.norm(), "exact linear norm")

    def rank(self) -> int:
        return int(np.linalg.matrix_rank(self.matrix, tol=RANK_TOL)) if self.matrix.size else 0

    def as_poly(self) -> "HomPoly":
        return HomPoly(1, self.domain, self.codomain, self.matrix)

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(other.domain, self.codomain, self.matrix @ other.matrix)


# --- polynomials -------------------------------------------------------------

@dataclass(frozen=True)
class HomPoly:
    degree: int
    domain: LpSpace
    codomain: LpSpace
    coeffs: np.ndarray  # (codomain.dim, num_monomials)

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be a positive integer")
        if self.degree > DEFAULT_MAX_DEGREE:
            raise DimensionError(f"degree {self.degree} exceeds the maximum {DEFAULT_MAX_DEGREE}")
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        want = (self.codomain.dim, num_monomials(self.domain.dim, self.degree))
        if c.shape != want:
            raise DimensionError(f"coefficient array has shape {c.shape}, expected {want}")
        object.__setattr__(self, "coeffs", c)

    # construction
    @classmethod
    def from_terms(cls, degree: int, domain: LpSpace, codomain: LpSpace, terms: dict) -> "HomPoly":
        """``terms`` maps (output index j, multi-index alpha) to a coefficient."""
        lookup = index_lookup(domain.dim, degree)
        c = np.zeros((codomain.dim, len(lookup)))
        for (j, alpha), v in terms.items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != domain.dim or sum(alpha) != degree or min(alpha) < 0:
                raise ValueError(f"multi-index {alpha} is not of degree {degree} in {domain.dim} variables")
            if not 0 <= j < codomain.dim:
                raise DimensionError(f"output index {j} out of range")
            c[j, lookup[alpha]] += v
        return cls(degree, domain, codomain, c)

    @classmethod
    def zero(cls, degree: int, domain: LpSpace, codomain: LpSpace) -> "HomPoly":
        return cls(degree, domain, codomain, np.zeros((codomain.dim, num_monomials(domain.dim, degree))))

    @property
    def alphas(self) -> np.ndarray:
        return multi_indices(self.domain.dim, self.degree)

    @property
    def num_monomials(self) -> int:
        return self.coeffs.shape[1]

    def terms(self) -> dict:
        out = {}
        for j in range(self.codomain.dim):
            for a, v in zip(self.alphas, self.coeffs[j]):
                if v != 0.0:
                    out[(j, tuple(int(t) for t in a))] = float(v)
        return out

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    # algebra
    def _check_same(self, other: "HomPoly"):
        if (self.degree, self.domain, self.codomain) != (other.degree, other.domain, other.codomain):
            raise DimensionError("polynomials live in different spaces")

    def __add__(self, other: "HomPoly") -> "HomPoly":
        self._check_same(other)
        return HomPoly(self.degree, self.domain, self.codomain, self.coeffs + other.coeffs)

    def __sub__(self, other: "HomPoly") -> "HomPoly":
        self._check_same(other)
        return HomPoly(self.degree, self.domain, self.codomain, self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "HomPoly":
        return HomPoly(self.degree, self.domain, self.codomain, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "HomPoly":
        return self * -1.0

    def with_coeffs(self, coeffs) -> "HomPoly":
        return HomPoly(self.degree, self.domain, self.codomain, coeffs)

    def with_spaces(self, domain: LpSpace | None = None, codomain: LpSpace | None = None) -> "HomPoly":
        return HomPoly(self.degree, domain or self.domain, codomain or self.codomain, self.coeffs)

    # evaluation
    def __call__(self, X) -> np.ndarray:
        X = X.coords if isinstance(X, Vector) else np.asarray(X, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.domain.dim:
            raise DimensionError(f"point of dimension {X.shape[1]} for a polynomial on {self.domain}")
        Y = monomials(X, self.degree) @ self.coeffs.T
        return Y[0] if single else Y

    def jacobian(self, X) -> np.ndarray:
        """Derivatives at rows of X; shape (n, codomain.dim, domain.dim)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        dt = derivative_tensor(self.coeffs, self.domain.dim, self.degree)  # (d, k, D')
        M = monomials(X, self.degree - 1)
        return np.einsum("nD,ikD->nki", M, dt)

    def __repr__(self):
        return f"HomPoly(m={self.degree}, {self.domain} -> {self.codomain}, {len(self.terms())} terms)"


def evaluate(P: HomPoly, x) -> np.ndarray:
    if isinstance(x, Vector) and x.space.dim != P.domain.dim:
        raise DimensionError("point outside the domain of P")
    return P(x)


def polarize(P: HomPoly, *xs) -> np.ndarray:
    """Symmetric m-linear form A with A(x, ..., x) = P(x), at (x_1, ..., x_m)."""
    m = P.degree
    if len(xs) != m:
        raise ValueError(f"polarization of a degree-{m} polynomial takes {m} points")
    pts = [np.asarray(x.coords if isinstance(x, Vector) else x, dtype=float) for x in xs]
    for x in pts:
        if x.shape != (P.domain.dim,):
            raise DimensionError("point outside the domain of P")
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=m)))
    combos = signs @ np.stack(pts)
    weights = signs.prod(axis=1)
    return (weights @ P(combos)) / (2**m * math.factorial(m))


def poly_rank(P: HomPoly) -> int:
    if P.is_zero():
        return 0
    return int(np.linalg.matrix_rank(P.coeffs, tol=RANK_TOL))


def compose(S: LinearMap | None, P: HomPoly, T: LinearMap | None) -> HomPoly:
    """S o P o T with expanded coefficients."""
    coeffs = P.coeffs
    domain, codomain = P.domain, P.codomain
    if T is not None:
        if T.codomain.dim != P.domain.dim:
            raise DimensionError("codomain of T must be the domain of P")
        coeffs = coeffs @ substitution_matrix(T.matrix, P.degree)
        domain = T.domain
    if S is not None:
        if S.domain.dim != P.codomain.dim:
            raise DimensionError("domain of S must be the codomain of P")
        coeffs = S.matrix @ coeffs
        codomain = S.codomain
    return HomPoly(P.degree, domain, codomain, coeffs)


# --- norms ----------------------------------------------------------------

def sphere_ascent(P: HomPoly, starts: int = 32, seed: int = 0, max_iters: int = 500,
                  min_step: float = 1e-10) -> tuple[float, np.ndarray]:
    """Multistart projected (sub)gradient ascent of |P(x)|_q on the unit sphere.

    Start i uses the generator seeded with ``seed + i``; the best value wins,
    ties going to the lowest start index.
    """
    p, q = P.domain.p, P.codomain.p
    d = P.domain.dim
    X = np.vstack([np.random.default_rng(seed + i).standard_normal(d) for i in range(starts)])
    X = X / lp_norm(X, p)[:, None]
    vals = lp_norm(P(X), q)
    step = np.ones(starts)
    active = np.ones(starts, dtype=bool)
    for _ in range(max_iters):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        Y = P(X[idx])
        G = dual_maximizer(Y, q)
        grad = np.einsum("nk,nki->ni", G, P.jacobian(X[idx]))
        gn = lp_norm(grad, 2.0)
        gn = np.where(gn > 0, gn, 1.0)
        cand = X[idx] + step[idx, None] * grad / gn[:, None]
        cn = lp_norm(cand, p)
        cand = cand / np.where(cn > 0, cn, 1.0)[:, None]
        cv = lp_norm(P(cand), q)
        ok = cv > vals[idx]
        X[idx[ok]] = cand[ok]
        vals[idx[ok]] = cv[ok]
        step[idx[~ok]] *= 0.5
        step[idx[ok]] *= 1.2
        active[idx] = step[idx] >= min_step
    i = int(np.argmax(vals))  # argmax returns the first (lowest-index) maximiser
    return float(vals[i]), X[i]


def sup_result(P: HomPoly, budget: OptimizerBudget = DEFAULT_BUDGET, seed: int = 0,
               outer=None, lipschitz: float = 1.0, ascent: bool = True) -> SupResult:
    """Certified sup of |P(x)|_q (or outer(P(x))) over the unit ball."""
    seeds = None
    if ascent and outer is None and P.domain.dim > 1:
        _, x = sphere_ascent(P, starts=budget.starts, seed=seed, max_iters=budget.max_iters)
        seeds = x[None, :]
    q, k = P.codomain.p, P.codomain.dim
    if outer is None and q != 2.0 and k > 1:
        G = np.eye(k) if q == math.inf else _sign_vectors(k)
        return certified_sup_functionals(P.coeffs, P.degree, P.domain.p, G, budget=budget,
                                         seed_points=seeds, dim=P.domain.dim)
    return certified_sup(P.coeffs, P.degree, P.domain.p, P.codomain.p, outer,
                         lipschitz=lipschitz, budget=budget, seed_points=seeds, dim=P.domain.dim)


def poly_norm(P: HomPoly, budget: OptimizerBudget = DEFAULT_BUDGET, seed: int = 0,
              strict: bool = True) -> CertifiedValue:
    """Certified interval for sup{|P(x)| : |x| <= 1}."""
    if P.is_zero():
        return CertifiedValue.zero("zero polynomial")
    if P.degree == 1:
        v, x = linear_norm(P.coeffs, P.domain.p, P.codomain.p)
        return CertifiedValue(v, v, True, True, "exact linear norm", witness=x)
    r = sup_result(P, budget, seed)
    if not r.converged and strict:
        raise BudgetExhausted(f"certified sup did not close: [{r.lo}, {r.hi}] after {r.cells} boxes")
    return CertifiedValue(r.lo, r.hi, True, True, "branch-and-bound sup", r.converged, witness=r.argmax)


# --- adjoint --------------------------------------------------------------

@dataclass
class PolySpaceElement:
    """A scalar m-homogeneous polynomial on X, normed by its sup over the ball."""

    poly: HomPoly
    budget: OptimizerBudget = field(default=DEFAULT_BUDGET, repr=False)

    def __post_init__(self):
        if self.poly.codomain.dim != 1:
            raise DimensionError("elements of P(^m X) are scalar polynomials")

    @cached_property
    def norm(self) -> CertifiedValue:
        return poly_norm(self.poly, self.budget)

    @property
    def coeffs(self) -> np.ndarray:
        return self.poly.coeffs[0]


@dataclass(frozen=True)
class AdjointMap:
    """phi -> phi o P, from (Y*, dual norm) to the coefficient space of P(^m X)."""

    poly: HomPoly

    @property
    def domain(self) -> LpSpace:
        return self.poly.codomain.dual()

    @property
    def matrix(self) -> np.ndarray:
        return self.poly.coeffs.T.copy()

    def __call__(self, phi, budget: OptimizerBudget = DEFAULT_BUDGET) -> PolySpaceElement:
        f = np.asarray(phi.coords if isinstance(phi, Vector) else phi, dtype=float)
        if f.shape != (self.poly.codomain.dim,):
            raise DimensionError("functional does not act on the codomain of P")
        scalar = HomPoly(self.poly.degree, self.poly.domain, LpSpace(1, 2.0), (f @ self.poly.coeffs)[None, :])
        return PolySpaceElement(scalar, budget)

    def rank(self) -> int:
        return poly_rank(self.poly)


def adjoint(P: HomPoly) -> AdjointMap:
    return AdjointMap(P)
