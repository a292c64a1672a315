"""Finite-dimensional l_p geometry.

Norms, dual norms, sphere nets, exact distances to subspaces and finite
l_1 lifts.  Every vector, operator and polynomial in the package is anchored
to two :class:`LpSpace` instances.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from scipy.stats import norm as _normal
from scipy.stats import qmc

ALLOWED_P = (1.0, 2.0, math.inf)
DEFAULT_MAX_DIM = 8
DEFAULT_MAX_DEGREE = 4


class DimensionError(ValueError):
    """Raised when dimensions disagree or exceed the configured guard."""


def max_dim() -> int:
    return int(os.environ.get("SNUM_MAX_DIM", DEFAULT_MAX_DIM))


def parse_p(p) -> float:
    """Normalise an exponent given as number or string ('inf', '∞')."""
    if isinstance(p, str):
        s = p.strip().lower()
        if s in ("inf", "infinity", "∞", "oo"):
            return math.inf
        p = float(s)
    p = float(p)
    if p not in ALLOWED_P:
        raise ValueError(f"unsupported exponent p={p}; expected one of 1, 2, inf")
    return p


def dual_exponent(p: float) -> float:
    if p == 1.0:
        return math.inf
    if p == math.inf:
        return 1.0
    return p / (p - 1.0)


def format_p(p: float) -> str:
    return "inf" if p == math.inf else str(int(p))


@dataclass(frozen=True)
class LpSpace:
    dim: int
    p: float = 2.0

    def __post_init__(self):
        if int(self.dim) < 1:
            raise DimensionError("dim must be >= 1")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "p", parse_p(self.p))

    @property
    def dual_p(self) -> float:
        return dual_exponent(self.p)

    def dual(self) -> "LpSpace":
        return LpSpace(self.dim, self.dual_p)

    def norm(self, x, axis=-1):
        return lp_norm(x, self.p, axis=axis)

    def __str__(self):
        return f"l_{format_p(self.p)}^{self.dim}"


@dataclass(frozen=True)
class Vector:
    space: LpSpace
    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float).reshape(-1)
        if c.shape[0] != self.space.dim:
            raise DimensionError(f"expected {self.space.dim} coordinates, got {c.shape[0]}")
        object.__setattr__(self, "coords", c)


def lp_norm(x, p: float, axis=-1):
    x = np.abs(np.asarray(x, dtype=float))
    if x.shape[axis] == 0:
        return np.zeros(np.delete(x.shape, axis))
    if p == math.inf:
        return x.max(axis=axis)
    if p == 1.0:
        return x.sum(axis=axis)
    if p == 2.0:
        return np.sqrt((x * x).sum(axis=axis))
    return (x**p).sum(axis=axis) ** (1.0 / p)


def vector_norm(v: Vector) -> float:
    return float(lp_norm(v.coords, v.space.p))


def dual_norm(f, space: LpSpace) -> float:
    """Norm of ``f`` as a functional on ``space``: its l_{p'} norm."""
    coords = f.coords if isinstance(f, Vector) else np.asarray(f, dtype=float)
    if coords.shape[-1] != space.dim:
        raise DimensionError("functional length does not match space dimension")
    return float(lp_norm(coords, space.dual_p))


def dual_maximizer(y: np.ndarray, q: float) -> np.ndarray:
    """Unit functionals g (in the dual norm of l_q) with g.y = ||y||_q, row-wise."""
    y = np.atleast_2d(np.asarray(y, dtype=float))
    g = np.zeros_like(y)
    if q == math.inf:
        j = np.argmax(np.abs(y), axis=1)
        rows = np.arange(y.shape[0])
        g[rows, j] = np.where(y[rows, j] >= 0, 1.0, -1.0)
    elif q == 1.0:
        g = np.where(y >= 0, 1.0, -1.0)
    else:
        nrm = lp_norm(y, 2.0)
        safe = np.where(nrm > 0, nrm, 1.0)
        g = y / safe[:, None]
        g[nrm == 0, 0] = 1.0
    return g


@dataclass(frozen=True)
class Subspace:
    ambient: LpSpace
    basis: np.ndarray  # (ambient.dim, dimension)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim == 1:
            b = b.reshape(-1, 1)
        if b.size == 0:
            b = np.zeros((self.ambient.dim, 0))
        if b.shape[0] != self.ambient.dim:
            raise DimensionError("basis vectors must live in the ambient space")
        if b.shape[1] > self.ambient.dim:
            raise DimensionError("too many basis vectors")
        if b.shape[1] and np.linalg.matrix_rank(b, tol=1e-10) < b.shape[1]:
            raise ValueError("basis vectors are linearly dependent")
        object.__setattr__(self, "basis", b)

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def span(cls, ambient: LpSpace, vectors) -> "Subspace":
        cols = [np.asarray(v.coords if isinstance(v, Vector) else v, dtype=float) for v in vectors]
        b = np.column_stack(cols) if cols else np.zeros((ambient.dim, 0))
        return cls(ambient, b)


# --- exact nearest points --------------------------------------------------

def _enumeration_systems(U: np.ndarray, q: float):
    """Precomputed vertex systems for the l_1 / l_inf nearest-point LPs."""
    k, r = U.shape
    systems = []
    if q == 1.0:
        for S in itertools.combinations(range(k), r):
            M = U[list(S), :]
            if abs(np.linalg.det(M)) > 1e-12:
                systems.append((list(S), np.linalg.inv(M)))
    else:
        cons = [(i, s) for i in range(k) for s in (1.0, -1.0)]
        for S in itertools.combinations(cons, r + 1):
            M = np.array([np.append(s * U[i], 1.0) for i, s in S])
            if abs(np.linalg.det(M)) > 1e-12:
                idx = [i for i, _ in S]
                sg = np.array([s for _, s in S])
                systems.append((idx, sg, np.linalg.inv(M)))
    return systems


def nearest_in_subspace(Y: np.ndarray, U: np.ndarray, q: float):
    """Distances and optimal coefficients of rows of ``Y`` to ``span(U)``.

    Exact for q in {1, 2, inf}: orthogonal projection for q=2, vertex
    enumeration of the (tiny) linear programs otherwise.
    Returns ``(dist, coeffs)`` with ``coeffs`` of shape (n, r).
    """
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    U = np.asarray(U, dtype=float).reshape(Y.shape[1], -1)
    n, k = Y.shape
    r = U.shape[1]
    if r == 0:
        return lp_norm(Y, q), np.zeros((n, 0))
    if q == 2.0:
        c, *_ = np.linalg.lstsq(U, Y.T, rcond=None)
        c = c.T
        return lp_norm(Y - c @ U.T, 2.0), c
    best = np.full(n, np.inf)
    best_c = np.zeros((n, r))
    for sysd in _enumeration_systems(U, q):
        if q == 1.0:
            S, Minv = sysd
            c = Y[:, S] @ Minv.T
        else:
            idx, sg, Minv = sysd
            sol = (Y[:, idx] * sg) @ Minv.T
            c = sol[:, :r]
        val = lp_norm(Y - c @ U.T, q)
        better = val < best
        best = np.where(better, val, best)
        best_c[better] = c[better]
    return best, best_c


def section_vertices(F: np.ndarray, p: float) -> np.ndarray:
    """Vertices (one per antipodal pair) of {x : F x = 0, |x|_p <= 1}, p in {1, inf}."""
    F = np.atleast_2d(np.asarray(F, dtype=float))
    d = F.shape[1]
    r = F.shape[0] if F.size else 0
    cands = []
    if p == math.inf:
        B = _null_basis(F, d) if r else np.eye(d)
        s = B.shape[1]
        for S in itertools.combinations(range(d), s):
            M = B[list(S)]
            if s == 0 or abs(np.linalg.det(M)) < 1e-12:
                continue
            Minv = np.linalg.inv(M)
            for signs in itertools.product((1.0, -1.0), repeat=s):
                x = B @ (Minv @ np.array(signs))
                if np.abs(x).max() <= 1 + 1e-9:
                    cands.append(x)
    elif p == 1.0:
        for size in range(1, r + 2):
            for S in itertools.combinations(range(d), size):
                ns = _null_basis(F[:, list(S)], size) if r else np.eye(size)
                if ns.shape[1] == 1:
                    x = np.zeros(d)
                    x[list(S)] = ns[:, 0]
                    cands.append(x / np.abs(x).sum())
    else:
        raise ValueError("section vertices exist only for polyhedral norms")
    if not cands:
        return np.zeros((0, d))
    X = np.array(cands)
    lead = X[np.arange(len(X)), np.argmax(np.abs(X) > 1e-12, axis=1)]
    X = X * np.where(lead < 0, -1.0, 1.0)[:, None]
    _, idx = np.unique(np.round(X, 10), axis=0, return_index=True)
    return X[np.sort(idx)]


def _null_basis(F: np.ndarray, d: int) -> np.ndarray:
    if F.size == 0:
        return np.eye(d)
    u, s, vt = np.linalg.svd(F)
    rank = int((s > 1e-10 * max(1.0, s.max() if s.size else 1.0)).sum())
    return vt[rank:].T


def distance_to_subspace(y, N: Subspace) -> float:
    coords = y.coords if isinstance(y, Vector) else np.asarray(y, dtype=float)
    if isinstance(y, Vector) and y.space != N.ambient:
        raise DimensionError("vector and subspace live in different spaces")
    d, _ = nearest_in_subspace(coords[None, :], N.basis, N.ambient.p)
    return float(d[0])


# --- sphere nets --------------------------------------------------------------

@dataclass(frozen=True)
class SphereNet:
    space: LpSpace
    points: np.ndarray  # (count, dim), unit l_p norm
    covering_radius: float

    def __len__(self):
        return self.points.shape[0]

    def half(self) -> np.ndarray:
        """One representative of each antipodal pair."""
        return half_sphere(self.points)


def half_sphere(points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    first = np.argmax(np.abs(pts) > 1e-14, axis=1)
    lead = pts[np.arange(len(pts)), first]
    return pts[lead > 0]


def _face_grid(dim: int, h: float, rng: np.random.Generator) -> np.ndarray:
    """Grid points on every face of the cube [-1, 1]^dim with spacing h."""
    faces = []
    for i in range(dim):
        for s in (1.0, -1.0):
            axes = []
            for _ in range(dim - 1):
                off = rng.uniform(0.0, h / 2)
                ticks = np.arange(-1.0 + off, 1.0 + h / 2, h)
                axes.append(np.clip(ticks, -1.0, 1.0))
            if axes:
                mesh = np.meshgrid(*axes, indexing="ij")
                free = np.column_stack([m.reshape(-1) for m in mesh])
            else:
                free = np.zeros((1, 0))
            pts = np.insert(free, i, s, axis=1)
            faces.append(pts)
    return np.vstack(faces)


def greedy_prune(points: np.ndarray, radius: float, p: float) -> np.ndarray:
    """Keep a radius-separated subset covering ``points`` within ``radius``.

    Points are scanned in lexicographic coordinate order.
    """
    order = np.lexsort(points.T[::-1])
    pts = points[order]
    tree = cKDTree(pts)
    covered = np.zeros(len(pts), dtype=bool)
    keep = []
    for i in range(len(pts)):
        if covered[i]:
            continue
        keep.append(i)
        covered[tree.query_ball_point(pts[i], radius, p=p)] = True
    return pts[keep]


def sphere_net(space: LpSpace, delta: float, seed: int = 0) -> SphereNet:
    """Deterministic delta-net of the unit sphere of ``space``."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if space.dim > max_dim():
        raise DimensionError(f"dim {space.dim} exceeds the configured maximum {max_dim()}")
    d, p = space.dim, space.p
    if d == 1:
        return SphereNet(space, np.array([[1.0], [-1.0]]), delta)
    # grid within delta/4 of every face point, radial projection at most
    # doubles distances (faces lie outside the unit ball), pruning adds delta/2
    spread = (d - 1) ** (0.0 if p == math.inf else 1.0 / p)
    h = delta / (2.0 * spread)
    rng = np.random.default_rng(seed)
    grid = _face_grid(d, h, rng)
    grid = grid / lp_norm(grid, p)[:, None]
    pts = greedy_prune(grid, delta / 2.0, p)
    return SphereNet(space, pts, delta)


def random_unit_vectors(space: LpSpace, count: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((count, space.dim))
    return g / lp_norm(g, space.p)[:, None]


# --- finite l_1 lifts -----------------------------------------------------------

@dataclass(frozen=True)
class FiniteL1Lift:
    """Linear map Q_N: l_1^N -> X, e_i -> atoms[i]."""

    target: LpSpace
    atoms: np.ndarray  # (N, dim)
    seed: int = field(default=0)

    def __post_init__(self):
        a = np.asarray(self.atoms, dtype=float)
        if a.ndim != 2 or a.shape[1] != self.target.dim:
            raise DimensionError("atoms must be vectors of the target space")
        if np.any(lp_norm(a, self.target.p) > 1 + 1e-12):
            raise ValueError("atoms must lie in the closed unit ball")
        object.__setattr__(self, "atoms", a)

    @property
    def size(self) -> int:
        return self.atoms.shape[0]

    @property
    def domain(self) -> LpSpace:
        return LpSpace(self.size, 1.0)

    @property
    def matrix(self) -> np.ndarray:
        return self.atoms.T.copy()

    def apply(self, lam) -> np.ndarray:
        return np.asarray(lam, dtype=float) @ self.atoms


def make_l1_lift(space: LpSpace, net_size: int, seed: int = 0) -> FiniteL1Lift:
    """Atoms: all +-e_i, then antipodal pairs of seeded quasi-random unit vectors."""
    d = space.dim
    if net_size < 2 * d:
        raise ValueError(f"net_size must be at least 2*dim = {2 * d}")
    eye = np.eye(d)
    atoms = [v for i in range(d) for v in (eye[i], -eye[i])]
    extra = net_size - 2 * d
    if extra:
        pairs = (extra + 1) // 2
        u = qmc.Halton(d=d, scramble=True, seed=seed).random(pairs)
        g = _normal.ppf(np.clip(u, 1e-12, 1 - 1e-12))
        g = g / lp_norm(g, space.p)[:, None]
        for v in g:
            atoms.extend([v, -v])
        atoms = atoms[:net_size]
    return FiniteL1Lift(space, np.array(atoms), seed)
