"""Independent brute-force baselines.

Nothing here calls the optimisation stack (poly/snum/certify): polynomials
are evaluated from their raw coefficient arrays, spheres are parametrised
by cube faces and scanned on grids.  Grid sups are lower bounds; minimax
values of explicit candidates come with a Lipschitz correction and are
upper bounds.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog, minimize, minimize_scalar
from scipy.spatial import cKDTree

from .poly import HomPoly, LinearMap

ORACLE_METHODS = ("svd", "grid", "exhaustive-minimax", "convex-1d", "monte-carlo", "support-function")


@dataclass
class OracleResult:
    value: float
    method: str
    resolution: dict = field(default_factory=dict)
    witness: object = field(default=None, repr=False)
    bound: str = "estimate"      # "lower", "upper" or "exact"


def _pnorm(Y: np.ndarray, p: float) -> np.ndarray:
    return np.linalg.norm(Y, ord=p, axis=-1)


def _evaluate(coeffs: np.ndarray, alphas: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Rows of X -> rows of values, by explicit products x^alpha."""
    mons = np.prod(X[:, None, :] ** alphas[None, :, :], axis=2)
    return mons @ coeffs.T


def _alphas(dim: int, degree: int) -> np.ndarray:
    """Multi-indices in the canonical order (combinations with replacement)."""
    out = []
    for combo in itertools.combinations_with_replacement(range(dim), degree):
        a = np.zeros(dim, dtype=int)
        for i in combo:
            a[i] += 1
        out.append(a)
    return np.array(out)


# --- svd ---------------------------------------------------------------------------

def svd_singular_values(T: LinearMap | np.ndarray) -> np.ndarray:
    """Singular values (nonincreasing) from the eigenvalues of T^T T."""
    if isinstance(T, LinearMap):
        if T.domain.p != 2.0 or T.codomain.p != 2.0:
            raise ValueError("singular values are the s-numbers only between Hilbert spaces (p = 2)")
        M = T.matrix
    else:
        M = np.asarray(T, dtype=float)
    w = np.linalg.eigvalsh(M.T @ M)[::-1]
    k = min(M.shape)
    return np.sqrt(np.clip(w[:k], 0.0, None))


# --- grids on spheres --------------------------------------------------------------

def face_grid(dim: int, resolution: int) -> tuple[np.ndarray, float]:
    """Points on the faces {y_i = 1} of the cube (one face per antipodal pair).

    Returns the points and the half-spacing h/2 in the sup norm.
    """
    if dim == 1:
        return np.ones((1, 1)), 0.0
    t = np.linspace(-1.0, 1.0, resolution)
    pts = []
    for i in range(dim):
        grids = np.meshgrid(*([t] * (dim - 1)), indexing="ij")
        free = np.column_stack([g.reshape(-1) for g in grids])
        y = np.insert(free, i, 1.0, axis=1)
        pts.append(y)
    return np.vstack(pts), 1.0 / (resolution - 1)


def _ratio(coeffs, alphas, Y, p, q, m):
    return _pnorm(_evaluate(coeffs, alphas, Y), q) / _pnorm(Y, p) ** m


def grid_norm(P: HomPoly, resolution: int = 2000, polish: bool = True) -> OracleResult:
    """max |P(x)| over a cube-face grid radially projected to the sphere, then one local polish.

    A lower bound on |P| converging as the resolution grows.
    """
    d, m = P.domain.dim, P.degree
    if d > 3:
        raise ValueError("grid_norm supports dim(X) <= 3")
    p, q = P.domain.p, P.codomain.p
    C = np.asarray(P.coeffs, dtype=float)
    A = _alphas(d, m)
    res = resolution if d <= 2 else int(min(resolution, 400))
    Y, _ = face_grid(d, res)
    vals = _ratio(C, A, Y, p, q, m)
    i = int(np.argmax(vals))
    best, y = float(vals[i]), Y[i]
    if polish and d >= 2:
        face = int(np.argmax(np.abs(y)))
        free = [j for j in range(d) if j != face]

        def neg(s):
            z = np.ones(d)
            z[free] = np.clip(s, -1.0, 1.0)
            z = z * np.sign(y[face])
            return -float(_ratio(C, A, z[None, :], p, q, m)[0])

        r = minimize(neg, y[free] * np.sign(y[face]), method="Nelder-Mead",
                     options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 2000})
        if -r.fun > best:
            best = -r.fun
            y = np.ones(d)
            y[free] = np.clip(r.x, -1.0, 1.0)
    x = y / np.linalg.norm(y, ord=p)
    return OracleResult(best, "grid", {"resolution": res, "points": len(Y)}, x, "lower")


def _lipschitz_face(coeffs: np.ndarray, alphas: np.ndarray, dim: int, p: float, q: float, m: int) -> float:
    """Crude Lipschitz constant (sup-norm steps) of |R(y)|_q / |y|_p^m on a cube face."""
    B = float(np.linalg.norm(np.abs(coeffs).sum(axis=1), ord=q))             # bound of |R| on the cube
    LR = float(np.linalg.norm(np.abs(coeffs) @ alphas.sum(axis=1), ord=q))    # bound of |dR| per unit step
    LN = dim ** (1.0 / p) if math.isfinite(p) else 1.0                         # |y|_p vs sup-norm steps
    return LR + m * B * LN                                                      # |y|_p >= 1 on a face


def grid_upper(coeffs: np.ndarray, degree: int, p: float, q: float, dim: int, resolution: int) -> float:
    """Upper bound on sup |R(x)|_q over the unit ball: grid max + Lipschitz x half-spacing."""
    A = _alphas(dim, degree)
    Y, half = face_grid(dim, resolution)
    vals = _ratio(coeffs, A, Y, p, q, degree)
    return float(vals.max()) + _lipschitz_face(coeffs, A, dim, p, q, degree) * half


# --- exhaustive minimax ------------------------------------------------------------

def _polygon_functionals(q: float, count: int = 32) -> np.ndarray:
    """Functionals g with |y|_q ~ max |g.y| in the plane (exact for q in {1, inf})."""
    if q == math.inf:
        return np.eye(2)
    if q == 1.0:
        return np.array([[1.0, 1.0], [1.0, -1.0]])
    t = np.pi * np.arange(count) / count
    return np.column_stack([np.cos(t), np.sin(t)])


def _fit_scalar(Cv: np.ndarray, Mx: np.ndarray, y: np.ndarray, G: np.ndarray) -> tuple[float, np.ndarray]:
    """min over b of max |g.(P(x) - (b.mono(x)) y)| on the grid, by LP."""
    Px = Mx @ Cv.T                       # (N, k)
    a = (Px @ G.T).reshape(-1)           # (N * |G|)
    gy = G @ y                           # (|G|,)
    M = np.einsum("nd,g->ngd", Mx, gy).reshape(len(a), -1)
    D = M.shape[1]
    c = np.zeros(D + 1)
    c[-1] = 1.0
    A_ub = np.vstack([np.hstack([M, -np.ones((len(a), 1))]), np.hstack([-M, -np.ones((len(a), 1))])])
    b_ub = np.concatenate([a, -a])
    r = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * D + [(0, None)], method="highs")
    return float(r.x[-1]), r.x[:D]


def exhaustive_minimax(P: HomPoly, n: int, coarse_resolution: int = 32, fine_resolution: int = 20001) -> OracleResult:
    """Upper bound on the n-th approximation number for dim(X) = dim(Y) = 2, m <= 2, n <= 2.

    Rank-one candidates Q(x) = b(x) y: the direction y runs over a coarse
    angular grid and is refined by a bounded scalar search; for each y the
    scalar coefficients b solve a linear program on a boundary grid.  The
    best candidate is then evaluated on a fine grid with a Lipschitz
    correction, which makes the value a rigorous upper bound.
    """
    if P.domain.dim != 2 or P.codomain.dim != 2 or P.degree > 2 or not 1 <= n <= 2:
        raise ValueError("exhaustive_minimax needs dim X = dim Y = 2, m <= 2 and n in {1, 2}")
    p, q, m = P.domain.p, P.codomain.p, P.degree
    C = np.asarray(P.coeffs, dtype=float)
    A = _alphas(2, m)
    meta = {"coarse": coarse_resolution, "fine": fine_resolution}
    if n == 1 or not np.any(C):
        ub = grid_upper(C, m, p, q, 2, fine_resolution) if np.any(C) else 0.0
        return OracleResult(ub, "exhaustive-minimax", meta, np.zeros_like(C), "upper")
    Y, _ = face_grid(2, 101)
    Y = Y / np.linalg.norm(Y, ord=p, axis=1)[:, None]
    Mx = np.prod(Y[:, None, :] ** A[None, :, :], axis=2)
    G = _polygon_functionals(q)

    def direction(t):
        return np.array([math.cos(t), math.sin(t)])

    def objective(t):
        return _fit_scalar(C, Mx, direction(t), G)[0]

    ts = np.pi * np.arange(coarse_resolution) / coarse_resolution
    vals = [objective(t) for t in ts]
    i = int(np.argmin(vals))
    h = np.pi / coarse_resolution
    r = minimize_scalar(objective, bounds=(ts[i] - h, ts[i] + h), method="bounded",
                        options={"xatol": 1e-10})
    t_best = float(r.x) if r.fun <= vals[i] else float(ts[i])
    y = direction(t_best)
    _, b = _fit_scalar(C, Mx, y, G)
    K = np.outer(y, b)
    ub = grid_upper(C - K, m, p, q, 2, fine_resolution)
    return OracleResult(ub, "exhaustive-minimax", meta, K, "upper")


# --- small convex problems and coverage checks ------------------------------------------

def distance_to_line(y: np.ndarray, u: np.ndarray, p: float, bound: float = 1e3) -> OracleResult:
    """min over t of |y - t u|_p by a bounded scalar search of a convex function."""
    y, u = np.asarray(y, float), np.asarray(u, float)
    r = minimize_scalar(lambda t: float(np.linalg.norm(y - t * u, ord=p)), bounds=(-bound, bound),
                        method="bounded", options={"xatol": 1e-12})
    return OracleResult(float(r.fun), "convex-1d", {"bound": bound}, float(r.x), "upper")


def net_coverage(net: np.ndarray, p: float, samples: int = 10_000, seed: int = 0) -> OracleResult:
    """max over random unit vectors of the l_p distance to the symmetric net +-net."""
    net = np.asarray(net, float)
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((samples, net.shape[1]))
    U = U / np.linalg.norm(U, ord=p, axis=1)[:, None]
    tree = cKDTree(np.vstack([net, -net]))
    dist, _ = tree.query(U, p=p)
    return OracleResult(float(dist.max()), "monte-carlo", {"samples": samples, "seed": seed}, None, "lower")


def hull_hausdorff(atoms: np.ndarray, p: float, delta: float = 0.01) -> OracleResult:
    """Euclidean Hausdorff distance between conv(+-atoms) and the unit l_p ball in the plane.

    Both sets are convex, so it is the largest gap of support functions
    over unit directions, scanned with angular step delta.
    """
    atoms = np.asarray(atoms, float)
    if atoms.shape[1] != 2:
        raise ValueError("hull_hausdorff is planar")
    t = np.arange(0.0, np.pi, delta)
    U = np.column_stack([np.cos(t), np.sin(t)])
    pd = 1.0 if p == math.inf else math.inf if p == 1.0 else p / (p - 1.0)
    h_ball = np.linalg.norm(U, ord=pd, axis=1)
    h_hull = np.abs(U @ atoms.T).max(axis=1)
    return OracleResult(float((h_ball - h_hull).max()), "support-function", {"delta": delta}, None, "lower")
