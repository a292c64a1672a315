"""Certified suprema of f(P(x)) over l_p balls and polytope boundaries.

Adaptive branch and bound over boxes.  The unit sphere of l_p^d is
parametrised by the faces of the cube [-1, 1]^d followed by radial
normalisation, which homogeneity makes exact:
``f(P(y/|y|)) = f(P(y)) / |y|^m``.  A box is bounded from above by the
mean-value form ``f(P(c)) + |sum_i sup|d_i P| r_i|`` (``f`` must be
Lipschitz with respect to the codomain norm), intersected with the
natural interval extension when ``f`` is the norm itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .monomials import derivative_tensor, interval_linear, interval_monomials, monomials
from .spaces import lp_norm
from .values import DEFAULT_BUDGET, OptimizerBudget

Outer = Callable[[np.ndarray], np.ndarray]


@dataclass
class SupResult:
    lo: float
    hi: float
    argmax: np.ndarray
    points: np.ndarray = field(repr=False)   # several near-maximisers, best first
    converged: bool = True
    cells: int = 0


@dataclass(frozen=True)
class Patch:
    """Affine piece x = origin + M s, s in [-1, 1]^s_dim."""

    origin: np.ndarray
    M: np.ndarray


def cube_face_patches(dim: int) -> list[Patch]:
    """Faces {y_i = 1} of the cube; antipodal faces are redundant by symmetry."""
    patches = []
    eye = np.eye(dim)
    for i in range(dim):
        free = [j for j in range(dim) if j != i]
        patches.append(Patch(eye[i].copy(), eye[:, free].copy()))
    return patches


def polygon_patches(vertices: np.ndarray) -> list[Patch]:
    """Edges of a closed polygon given by vertices in cyclic order."""
    v = np.asarray(vertices, dtype=float)
    out = []
    for a, b in zip(v, np.roll(v, -1, axis=0)):
        out.append(Patch((a + b) / 2.0, ((b - a) / 2.0).reshape(-1, 1)))
    return out


def _initial_split(s_dim: int) -> int:
    return {0: 1, 1: 32, 2: 10, 3: 5}.get(s_dim, 3)


def _norm_outer(q: float) -> Outer:
    return lambda Y: lp_norm(Y, q)


def certified_sup(
    coeffs: np.ndarray,
    degree: int,
    p: float,
    q: float,
    outer: Outer | None = None,
    *,
    lipschitz: float = 1.0,
    patches: list[Patch] | None = None,
    budget: OptimizerBudget = DEFAULT_BUDGET,
    seed_points: np.ndarray | None = None,
    top: int = 8,
    rtol: float | None = None,
    dim: int | None = None,
) -> SupResult:
    """Rigorous enclosure of sup f(P(x)) for x in the closed unit ball of l_p^d.

    ``outer`` defaults to the l_q norm.  ``lipschitz`` is the Lipschitz
    constant of ``outer`` w.r.t. l_q.  With ``patches`` given, the supremum
    is taken over their union instead (no radial normalisation); for a
    balanced polytope, its boundary edges give the supremum over the polytope.
    """
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
    k, _ = coeffs.shape
    is_norm = outer is None
    f = _norm_outer(q) if is_norm else outer
    normalize = patches is None
    if dim is None:
        dim = len(patches[0].origin) if patches else _dim_from_count(coeffs.shape[1], degree)
    if rtol is None:
        # closing is quadratic in the box size; higher-dimensional faces need
        # many more boxes per halving, so they close to a looser tolerance
        rtol = budget.cert_rtol * (1.0 if dim <= 2 else 100.0 if dim == 3 else 1000.0)
    atol = budget.cert_atol

    def value(X):
        v = f(monomials(X, degree) @ coeffs.T)
        if normalize:
            v = v / lp_norm(X, p) ** degree
        return v

    if dim == 1 and normalize:
        x = np.array([[1.0]])
        v = float(value(x)[0])
        return SupResult(v, v, x[0], x, True, 1)

    if patches is None:
        patches = cube_face_patches(dim)
    dcoef = derivative_tensor(coeffs, dim, degree) if degree >= 1 else None

    best_lo, best_x = -np.inf, None
    pool_v, pool_x = [], []
    if seed_points is not None and len(seed_points):
        sp = np.atleast_2d(np.asarray(seed_points, dtype=float))
        sv = value(sp)
        i = int(np.argmax(sv))
        best_lo, best_x = float(sv[i]), sp[i] / (lp_norm(sp[i], p) if normalize else 1.0)
        pool_v.append(sv)
        pool_x.append(sp / (lp_norm(sp, p)[:, None] if normalize else 1.0))

    # boxes: patch id, centre s, half-width w
    pid, cen, hw = [], [], []
    for j, pt in enumerate(patches):
        s = pt.M.shape[1]
        g = _initial_split(s)
        ticks = -1.0 + (2 * np.arange(g) + 1) / g
        grids = np.meshgrid(*([ticks] * s), indexing="ij") if s else []
        c = np.column_stack([m.reshape(-1) for m in grids]) if s else np.zeros((1, 0))
        pid.append(np.full(len(c), j))
        cen.append(c)
        hw.append(np.full(c.shape, 1.0 / g))
    s_dims = {pt.M.shape[1] for pt in patches}
    if len(s_dims) != 1:
        raise ValueError("all patches must share the parameter dimension")
    s_dim = s_dims.pop()
    pid = np.concatenate(pid)
    cen = np.vstack(cen)
    hw = np.vstack(hw)
    origins = np.stack([pt.origin for pt in patches])
    mats = np.stack([pt.M for pt in patches])  # (npatch, d, s)

    pruned_max = -np.inf
    cells = 0
    converged = True
    while len(pid):
        cells += len(pid)
        O = origins[pid]
        Mb = mats[pid]
        xc = O + np.einsum("nds,ns->nd", Mb, cen)
        rad = np.einsum("nds,ns->nd", np.abs(Mb), hw)
        Pc = monomials(xc, degree) @ coeffs.T
        fc = f(Pc)
        xlo, xhi = xc - rad, xc + rad
        mlo, mhi = interval_monomials(xlo, xhi, degree)
        plo, phi = interval_linear(coeffs, mlo, mhi)
        if normalize:
            nearest = np.where((xlo < 0) & (xhi > 0), 0.0, np.minimum(np.abs(xlo), np.abs(xhi)))
            farthest = np.maximum(np.abs(xlo), np.abs(xhi))
            nmin = lp_norm(nearest, p)
            nmax = lp_norm(farthest, p)
            ncen = lp_norm(xc, p)
            vals = fc / ncen**degree
            pts = xc / ncen[:, None]
            center = f(Pc / ncen[:, None] ** degree)
        else:
            vals = fc
            pts = xc
            center = fc
        if degree >= 1:
            dlo_m, dhi_m = interval_monomials(xlo, xhi, degree - 1)
            err = np.zeros((len(pid), k))
            if normalize:
                # d_i [P / N^m] = d_i P / N^m - m P d_i N / N^(m+1)
                inv_m = (nmax ** -degree, nmin ** -degree)
                inv_m1 = (nmax ** -(degree + 1), nmin ** -(degree + 1))
            for i in range(dim):
                if not np.any(rad[:, i]):
                    continue
                glo, ghi = interval_linear(dcoef[i], dlo_m, dhi_m)
                if normalize:
                    dn_lo, dn_hi = _norm_partial(xlo[:, i], xhi[:, i], nmin, nmax, p)
                    alo, ahi = _imul(glo, ghi, inv_m[0][:, None], inv_m[1][:, None])
                    blo, bhi = _imul(plo, phi, inv_m1[0][:, None], inv_m1[1][:, None])
                    blo, bhi = _imul(blo, bhi, (degree * dn_lo)[:, None], (degree * dn_hi)[:, None])
                    glo, ghi = alo - bhi, ahi - blo
                err += np.maximum(np.abs(glo), np.abs(ghi)) * rad[:, [i]]
            upper = center + lipschitz * lp_norm(err, q)
        else:
            upper = center.copy()
        if is_norm:
            naive = lp_norm(np.maximum(np.abs(plo), np.abs(phi)), q)
            if normalize:
                naive = naive / nmin**degree
            upper = np.minimum(upper, naive)
        i = int(np.argmax(vals))
        if vals[i] > best_lo:
            best_lo, best_x = float(vals[i]), pts[i].copy()
        order = np.argsort(-vals)[: max(top, 1) * 4]
        pool_v.append(vals[order])
        pool_x.append(pts[order])

        tol = max(atol, rtol * abs(best_lo))
        keep = upper > best_lo + tol
        if np.any(~keep):
            pruned_max = max(pruned_max, float(upper[~keep].max()))
        if not np.any(keep):
            pid = pid[:0]
            break
        if cells > budget.max_cells:
            converged = False
            pruned_max = max(pruned_max, float(upper[keep].max()))
            break
        pid, cen, hw = pid[keep], cen[keep], hw[keep]
        # bisect every parameter direction
        if s_dim == 0:
            pruned_max = max(pruned_max, float(upper[keep].max()))
            break
        signs = np.array(list(np.ndindex(*([2] * s_dim)))) * 2 - 1  # (2^s, s)
        half = hw / 2.0
        cen = (cen[:, None, :] + signs[None, :, :] * half[:, None, :]).reshape(-1, s_dim)
        hw = np.repeat(half, len(signs), axis=0)
        pid = np.repeat(pid, len(signs))

    hi = max(pruned_max, best_lo)
    hi = hi * (1 + 1e-12) + 1e-15
    points = _select_points(np.concatenate(pool_v), np.vstack(pool_x), best_lo, top)
    return SupResult(best_lo, hi, best_x, points, converged, cells)


def _imul(alo, ahi, blo, bhi):
    c = np.stack(np.broadcast_arrays(alo * blo, alo * bhi, ahi * blo, ahi * bhi))
    return c.min(axis=0), c.max(axis=0)


def _norm_partial(lo, hi, nmin, nmax, p):
    """Enclosure of the (generalised) partial derivative of |y|_p in y_i."""
    if p == 2.0:
        return _imul(lo, hi, 1.0 / nmax, 1.0 / nmin)
    if p == 1.0:
        return np.where(lo >= 0, 1.0, -1.0), np.where(hi <= 0, -1.0, 1.0)
    # cube faces: |y|_inf is identically one on every face box
    return np.zeros_like(lo), np.zeros_like(lo)


def _dim_from_count(count: int, degree: int) -> int:
    from math import comb

    d = 1
    while comb(d + degree - 1, degree) < count:
        d += 1
    if comb(d + degree - 1, degree) != count:
        raise ValueError("coefficient count is not a monomial count")
    return d


def _select_points(vals, pts, best, top, sep=0.05):
    order = np.argsort(-vals, kind="stable")
    chosen = []
    floor = best - 0.25 * abs(best)
    for i in order:
        if vals[i] < floor or len(chosen) >= top:
            break
        x = pts[i]
        if all(min(np.abs(x - y).max(), np.abs(x + y).max()) > sep for y in chosen):
            chosen.append(x)
    if not chosen:
        chosen = [pts[order[0]]]
    return np.array(chosen)


def certified_sup_functionals(
    coeffs: np.ndarray,
    degree: int,
    p: float,
    functionals: np.ndarray,
    *,
    budget: OptimizerBudget = DEFAULT_BUDGET,
    seed_points: np.ndarray | None = None,
    top: int = 8,
    dim: int | None = None,
) -> SupResult:
    """sup over the unit ball of max_g |g . P(x)|, one scalar problem per g.

    A polyhedral norm (or a distance in one) is the maximum of finitely many
    |linear functionals|; splitting keeps every subproblem smooth near its
    maximisers, where a max of several pieces would close only linearly.
    """
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
    runs = [certified_sup((g @ coeffs)[None, :], degree, p, 2.0, budget=budget,
                          seed_points=seed_points, top=top, dim=dim)
            for g in np.atleast_2d(functionals)]
    los = np.array([r.lo for r in runs])
    i = int(np.argmax(los))
    best = runs[i]
    hi = max(r.hi for r in runs)
    order = np.argsort(-los, kind="stable")
    pts = [runs[j].points for j in order if los[j] >= best.lo - 0.25 * abs(best.lo)]
    points = np.vstack(pts)[: max(top, 1)]
    return SupResult(best.lo, hi, best.argmax, points, all(r.converged for r in runs),
                     sum(r.cells for r in runs))
