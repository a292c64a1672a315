"""Discretised rank-constrained searches shared by every s-number family.

Two problems appear over and over:

* ``rank_minimax``: minimise max_{g in G, e in E} |g (A - Y Z) e| over
  Y (rows x r), Z (r x cols).  Each half-step is a linear program; the
  search alternates them from several starts.
* ``subspace_search``: minimise max_j dist_q(v_j, span U) over r-frames U
  by Nelder-Mead on the (orthonormalised) frame entries.

Both only produce candidates; callers certify them with exact or
branch-and-bound norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import linprog, minimize

from ..monomials import monomials
from ..spaces import LpSpace, half_sphere, lp_norm, nearest_in_subspace, sphere_net
from ..values import OptimizerBudget


# --- discretisations ------------------------------------------------------

@lru_cache(maxsize=64)
def _net_points(space: LpSpace, delta: float, seed: int) -> np.ndarray:
    pts = half_sphere(sphere_net(space, delta, seed).points)
    pts.setflags(write=False)
    return pts


def x_net(space: LpSpace, budget: OptimizerBudget, seed: int = 0, delta: float | None = None) -> np.ndarray:
    """One representative per antipodal pair of a delta-net of the unit sphere."""
    d = budget.delta_for(space.dim) if delta is None else delta
    return np.array(_net_points(space, float(d), int(seed)))


# largest minimax LP (rows per sign) attempted; bigger problems keep their hint candidates
MAX_LP_ROWS = 30_000


@lru_cache(maxsize=64)
def _norming(q: float, k: int, resolution: int, delta: float) -> tuple[np.ndarray, float]:
    if q == math.inf:
        return np.eye(k), 1.0
    if q == 1.0:
        from ..poly import _sign_vectors

        return _sign_vectors(k), 1.0
    if k == 1:
        return np.ones((1, 1)), 1.0
    if k == 2:
        ang = np.arange(resolution) * math.pi / resolution
        G = np.column_stack([np.cos(ang), np.sin(ang)])
        return G, 1.0 / math.cos(math.pi / (2 * resolution))
    # a unit y within delta of a unit g has g.y = 1 - |g - y|^2 / 2
    G = half_sphere(sphere_net(LpSpace(k, 2.0), delta, 0).points)
    return G, 1.0 / (1.0 - delta * delta / 2.0)


def norming_functionals(q: float, k: int, resolution: int = 32, delta: float = 0.2) -> tuple[np.ndarray, float]:
    """Unit functionals g (dual norm <= 1) with |y|_q <= factor * max_g |g.y|.

    Exact extreme points of the dual ball for q in {1, inf} (factor 1);
    an angular grid (k = 2) or a delta-net of the sphere (k >= 3) for q = 2.
    Antipodal copies are omitted.
    """
    G, f = _norming(float(q), int(k), int(resolution), float(delta))
    return G.copy(), f


def image_points(coeffs: np.ndarray, X: np.ndarray, degree: int) -> np.ndarray:
    return monomials(X, degree) @ coeffs.T


# --- linear programs ----------------------------------------------------------

def chebyshev_lp(M: np.ndarray, a: np.ndarray) -> tuple[float, np.ndarray]:
    """min_v max_i |a_i - M_i v| as a linear program."""
    n, v = M.shape
    ones = np.ones((n, 1))
    A_ub = np.vstack([np.hstack([M, -ones]), np.hstack([-M, -ones])])
    b_ub = np.concatenate([a, -a])
    c = np.zeros(v + 1)
    c[-1] = 1.0
    bounds = [(None, None)] * v + [(0, None)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0:
        raise RuntimeError(f"minimax LP failed: {res.message}")
    return float(res.x[-1]), res.x[:-1]


@dataclass
class MinimaxResult:
    value: float
    Y: np.ndarray
    Z: np.ndarray

    @property
    def K(self) -> np.ndarray:
        return self.Y @ self.Z


def minimax_value(A, G, E, K) -> float:
    return float(np.abs(G @ (A - K) @ E).max())


def _y_step(A, G, E, Z):
    r = Z.shape[0]
    a = (G @ A @ E).reshape(-1)
    ZE = Z @ E
    M = np.einsum("ia,jb->ijab", G, ZE.T).reshape(len(a), -1)
    val, y = chebyshev_lp(M, a)
    return val, y.reshape(A.shape[0], r)


def _z_step(A, G, E, Y):
    r = Y.shape[1]
    a = (G @ A @ E).reshape(-1)
    GY = G @ Y
    M = np.einsum("ib,jc->ijbc", GY, E.T).reshape(len(a), -1)
    val, z = chebyshev_lp(M, a)
    return val, z.reshape(r, A.shape[1])


def _balance(Y, Z):
    """Rescale so that Y has orthonormal-ish columns (keeps LPs well scaled)."""
    q, rr = np.linalg.qr(Y)
    return q, rr @ Z


def rank_minimax(A: np.ndarray, G: np.ndarray, E: np.ndarray, r: int,
                 starts: list[tuple[np.ndarray, np.ndarray]], iters: int = 25,
                 rtol: float = 1e-7) -> MinimaxResult:
    """Alternating LP descent from each start; the lowest value wins (first on ties)."""
    best: MinimaxResult | None = None
    for Y, Z in starts:
        Y, Z = _balance(np.asarray(Y, float).reshape(A.shape[0], r), np.asarray(Z, float).reshape(r, A.shape[1]))
        val = minimax_value(A, G, E, Y @ Z)
        for _ in range(iters):
            v1, Z1 = _z_step(A, G, E, Y)
            v2, Y2 = _y_step(A, G, E, Z1)
            new = min(v1, v2)
            Y, Z = _balance(Y2, Z1) if v2 <= v1 else (Y, Z1)
            improved = val - new
            val = min(val, new)
            if improved <= rtol * max(val, 1e-300):
                break
        if best is None or val < best.value:
            best = MinimaxResult(val, Y, Z)
    return best


def factor_rank(K: np.ndarray, r: int) -> tuple[np.ndarray, np.ndarray]:
    """Y, Z with Y @ Z the best rank-r approximation of K (exact if rank K <= r)."""
    u, s, vt = np.linalg.svd(K, full_matrices=False)
    return u[:, :r] * s[:r], vt[:r]


def random_factors(shape: tuple[int, int], r: int, rng: np.random.Generator, scale: float = 1.0):
    k, D = shape
    return rng.standard_normal((k, r)), scale * rng.standard_normal((r, D))


# --- subspace search --------------------------------------------------------

def orthonormal_frame(U: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(U)
    return q


def subspace_objective(V: np.ndarray, U: np.ndarray, q: float) -> float:
    d, _ = nearest_in_subspace(V, U, q)
    return float(d.max())


@dataclass
class SubspaceResult:
    value: float
    U: np.ndarray


def subspace_search(V: np.ndarray, r: int, q: float, starts: list[np.ndarray],
                    max_iters: int = 400) -> SubspaceResult:
    """Minimise max_j dist_q(V_j, span U) over k x r frames U."""
    k = V.shape[1]

    def fun(theta):
        U = theta.reshape(k, r)
        if np.linalg.matrix_rank(U, tol=1e-9) < r:
            return float(lp_norm(V, q).max())
        return subspace_objective(V, orthonormal_frame(U), q)

    best: SubspaceResult | None = None
    for U0 in starts:
        U0 = orthonormal_frame(np.asarray(U0, float).reshape(k, r))
        res = minimize(fun, U0.reshape(-1), method="Nelder-Mead",
                       options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": max_iters * k * r,
                                "initial_simplex": _simplex(U0.reshape(-1))})
        U = orthonormal_frame(res.x.reshape(k, r))
        val = subspace_objective(V, U, q)
        if best is None or val < best.value:
            best = SubspaceResult(val, U)
    return best


def _simplex(x0: np.ndarray, step: float = 0.2) -> np.ndarray:
    n = len(x0)
    S = np.tile(x0, (n + 1, 1))
    for i in range(n):
        S[i + 1, i] += step
    return S
