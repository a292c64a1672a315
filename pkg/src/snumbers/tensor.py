"""Symmetric projective tensor powers in monomial coordinates.

An element u of the m-fold symmetric tensor power of X is stored through
its coordinates against the monomials: delta(x) has coordinates (x^alpha).
A polynomial P then linearises to its own coefficient matrix, and the
projective norm is

    pi_s(u) = inf { sum |lambda_i| : u = sum lambda_i delta(x_i), |x_i| = 1 },

computed by column generation with a certified dual witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .certify import certified_sup
from .monomials import monomials, multi_indices, num_monomials, substitution_matrix
from .poly import HomPoly, LinearMap, linear_norm, poly_norm
from .spaces import DimensionError, LpSpace, Vector, lp_norm, random_unit_vectors
from .values import DEFAULT_BUDGET, CertifiedValue, OptimizerBudget


@dataclass(frozen=True)
class SymTensorSpace:
    base: LpSpace
    degree: int

    @property
    def dim(self) -> int:
        return num_monomials(self.base.dim, self.degree)

    @property
    def alphas(self) -> np.ndarray:
        return multi_indices(self.base.dim, self.degree)

    def __str__(self):
        return f"S^{self.degree}({self.base})"


@dataclass(frozen=True)
class SymTensor:
    space: SymTensorSpace
    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float).reshape(-1)
        if c.shape[0] != self.space.dim:
            raise DimensionError(f"expected {self.space.dim} coordinates, got {c.shape[0]}")
        object.__setattr__(self, "coords", c)

    def __add__(self, other: "SymTensor") -> "SymTensor":
        if other.space != self.space:
            raise DimensionError("tensors live in different spaces")
        return SymTensor(self.space, self.coords + other.coords)

    def __sub__(self, other: "SymTensor") -> "SymTensor":
        return self + other * -1.0

    def __mul__(self, s: float) -> "SymTensor":
        return SymTensor(self.space, self.coords * float(s))

    __rmul__ = __mul__


def delta(x, m: int) -> SymTensor:
    """The elementary symmetric tensor x (x) ... (x) x."""
    if isinstance(x, Vector):
        space, coords = x.space, x.coords
    else:
        coords = np.asarray(x, dtype=float).reshape(-1)
        space = LpSpace(coords.shape[0], 2.0)
    return SymTensor(SymTensorSpace(space, m), monomials(coords[None, :], m)[0])


@dataclass
class PiSCertificate:
    """Primal decomposition and dual witness bracketing pi_s(u)."""

    weights: np.ndarray          # lambda_i
    points: np.ndarray           # unit vectors x_i, one per row
    dual_witness: np.ndarray     # coefficients b of a scalar polynomial with |B| <= 1
    residual: float
    iterations: int = 0
    converged: bool = True

    @property
    def decomposition(self) -> list[tuple[float, np.ndarray]]:
        return [(float(w), x) for w, x in zip(self.weights, self.points)]


def _initial_atoms(space: SymTensorSpace, seed: int) -> np.ndarray:
    X = space.base
    rng = np.random.default_rng(seed)
    pts = [np.eye(X.dim), random_unit_vectors(X, 8, rng)]
    atoms = np.vstack(pts)
    while np.linalg.matrix_rank(monomials(atoms, space.degree), tol=1e-10) < space.dim:
        atoms = np.vstack([atoms, random_unit_vectors(X, 4, rng)])
    return atoms


def _l1_fit(Delta: np.ndarray, u: np.ndarray):
    """min |lam|_1 s.t. Delta.T lam = u; returns (value, lam, dual b)."""
    a = Delta.shape[0]
    A_eq = np.hstack([Delta.T, -Delta.T])
    res = linprog(np.ones(2 * a), A_eq=A_eq, b_eq=u, bounds=(0, None), method="highs")
    if res.status != 0:
        raise RuntimeError(f"projective-norm LP failed: {res.message}")
    lam = res.x[:a] - res.x[a:]
    # re-solve on the support so the decomposition is exact to rounding
    S = np.flatnonzero(np.abs(lam) > 1e-12)
    if S.size:
        fit, *_ = np.linalg.lstsq(Delta[S].T, u, rcond=None)
        lam = np.zeros(a)
        lam[S] = fit
    # the atoms span the tensor space, so a min-norm correction makes the fit exact
    corr, *_ = np.linalg.lstsq(Delta.T, u - Delta.T @ lam, rcond=None)
    lam = lam + corr
    return float(np.abs(lam).sum()), lam, np.asarray(res.eqlin.marginals, dtype=float)


def pi_s_norm(u: SymTensor, budget: OptimizerBudget = DEFAULT_BUDGET, seed: int = 0,
              max_rounds: int = 60) -> tuple[CertifiedValue, PiSCertificate]:
    """Certified interval for the symmetric projective norm of ``u``."""
    space = u.space
    X, m = space.base, space.degree
    if not np.any(u.coords):
        cert = PiSCertificate(np.zeros(0), np.zeros((0, X.dim)), np.zeros(space.dim), 0.0)
        return CertifiedValue.zero("zero tensor"), cert
    atoms = _initial_atoms(space, seed)
    best_lo, best_b = 0.0, np.zeros(space.dim)
    hi, lam = np.inf, None
    converged = False
    it = 0
    for it in range(1, max_rounds + 1):
        Delta = monomials(atoms, m)
        hi, lam, b = _l1_fit(Delta, u.coords)
        used = atoms
        sup = certified_sup(b[None, :], m, X.p, 2.0, budget=budget, dim=X.dim)
        if sup.hi > 0:
            lo = abs(float(b @ u.coords)) / sup.hi
            if lo > best_lo:
                best_lo, best_b = lo, b / sup.hi
        if hi - best_lo <= 0.1 * budget.tolerance * hi or sup.lo <= 1.0 + 1e-12:
            converged = True
            break
        new = sup.points
        if X.dim == 1:
            new = np.array([[1.0]])
        atoms = np.vstack([atoms, new])
    residual = float(np.abs(monomials(used, m).T @ lam - u.coords).max())
    if residual > 1e-8:
        raise RuntimeError(f"decomposition residual {residual:.2e} exceeds 1e-8")
    keep = np.abs(lam) > 1e-14
    cert = PiSCertificate(lam[keep], used[keep], best_b, residual, it, converged)
    gap_ok = hi - best_lo <= budget.tolerance * hi
    value = CertifiedValue(best_lo, hi, True, True, "column generation with dual witness",
                           converged and gap_ok, witness=cert)
    return value, cert


def linearize(P: HomPoly) -> "LinearizedMap":
    return LinearizedMap(SymTensorSpace(P.domain, P.degree), P.codomain, P.coeffs.copy())


@dataclass(frozen=True)
class LinearizedMap:
    """The linear map P_L on the symmetric projective tensor power."""

    domain: SymTensorSpace
    codomain: LpSpace
    matrix: np.ndarray

    def __call__(self, u: SymTensor) -> np.ndarray:
        if u.space != self.domain:
            raise DimensionError("tensor outside the domain")
        return self.matrix @ u.coords

    def as_poly(self) -> HomPoly:
        return HomPoly(self.domain.degree, self.domain.base, self.codomain, self.matrix)

    def rank(self) -> int:
        return int(np.linalg.matrix_rank(self.matrix, tol=1e-10)) if np.any(self.matrix) else 0

    def norm(self, budget: OptimizerBudget = DEFAULT_BUDGET) -> CertifiedValue:
        """Operator norm on the pi_s ball: its extreme points are +-delta(x), |x| = 1."""
        return poly_norm(self.as_poly(), budget)


@dataclass(frozen=True)
class TensorLinearMap:
    domain: SymTensorSpace
    codomain: SymTensorSpace
    matrix: np.ndarray
    base_map: LinearMap = field(repr=False)

    def __call__(self, u: SymTensor) -> SymTensor:
        return SymTensor(self.codomain, self.matrix @ u.coords)

    def norm(self, budget: OptimizerBudget = DEFAULT_BUDGET, seed: int = 0,
             samples: int = 4) -> CertifiedValue:
        """Bracket the pi_s operator norm by evaluating extreme points.

        hi is the product bound |T|^m; lo is the largest certified pi_s
        value of the image of delta(x) over a maximiser of T and a few
        random unit x.
        """
        T = self.base_map
        m = self.domain.degree
        tn, xstar = linear_norm(T.matrix, T.domain.p, T.codomain.p)
        xs = [xstar / lp_norm(xstar, T.domain.p)]
        rng = np.random.default_rng(seed)
        xs.extend(random_unit_vectors(T.domain, samples, rng))
        lo = 0.0
        for x in xs:
            v, _ = pi_s_norm(self(delta(Vector(T.domain, x), m)), budget, seed)
            lo = max(lo, v.lo)
        return CertifiedValue(lo, tn**m, True, True, "extreme points versus product bound")


def lift_operator(T: LinearMap, m: int) -> TensorLinearMap:
    """Matrix of delta(x) -> delta(Tx) in monomial coordinates."""
    L = substitution_matrix(T.matrix, m)
    return TensorLinearMap(SymTensorSpace(T.domain, m), SymTensorSpace(T.codomain, m), L, T)
