"""Multi-index bookkeeping for homogeneous polynomials in the monomial basis."""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb

import numpy as np


@lru_cache(maxsize=None)
def multi_indices(dim: int, degree: int) -> np.ndarray:
    """Canonical multi-indices |alpha| = degree, e.g. (2,0), (1,1), (0,2)."""
    rows = []
    for combo in itertools.combinations_with_replacement(range(dim), degree):
        a = [0] * dim
        for v in combo:
            a[v] += 1
        rows.append(a)
    arr = np.array(rows, dtype=np.int64).reshape(-1, dim)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def index_lookup(dim: int, degree: int) -> dict:
    return {tuple(int(v) for v in a): i for i, a in enumerate(multi_indices(dim, degree))}


def num_monomials(dim: int, degree: int) -> int:
    return comb(dim + degree - 1, degree)


def monomials(X: np.ndarray, degree: int) -> np.ndarray:
    """Rows x -> (x^alpha)_alpha in canonical order; shape (n, D)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n, d = X.shape
    alphas = multi_indices(d, degree)
    if degree == 0:
        return np.ones((n, 1))
    powers = np.stack([X**e for e in range(degree + 1)], axis=0)  # (m+1, n, d)
    out = np.ones((n, alphas.shape[0]))
    for i in range(d):
        out *= powers[alphas[:, i], :, i].T
    return out


def derivative_tensor(coeffs: np.ndarray, dim: int, degree: int) -> np.ndarray:
    """Coefficients of the partial derivatives: shape (dim, k, D_{degree-1})."""
    k = coeffs.shape[0]
    alphas = multi_indices(dim, degree)
    lower = index_lookup(dim, degree - 1)
    out = np.zeros((dim, k, num_monomials(dim, degree - 1)))
    for a_idx, a in enumerate(alphas):
        for i in range(dim):
            if a[i]:
                b = list(a)
                b[i] -= 1
                out[i, :, lower[tuple(b)]] += a[i] * coeffs[:, a_idx]
    return out


def _interval_mul(alo, ahi, blo, bhi):
    p = np.stack([alo * blo, alo * bhi, ahi * blo, ahi * bhi])
    return p.min(axis=0), p.max(axis=0)


def interval_monomials(lo: np.ndarray, hi: np.ndarray, degree: int):
    """Enclosures of every monomial over boxes [lo, hi]; two arrays (n, D)."""
    n, d = lo.shape
    alphas = multi_indices(d, degree)
    plo = [np.ones_like(lo)]
    phi = [np.ones_like(lo)]
    for e in range(1, degree + 1):
        a, b = lo**e, hi**e
        if e % 2:
            plo.append(a)
            phi.append(b)
        else:
            straddle = (lo < 0) & (hi > 0)
            plo.append(np.where(straddle, 0.0, np.minimum(a, b)))
            phi.append(np.maximum(a, b))
    plo = np.stack(plo)
    phi = np.stack(phi)
    mlo = np.ones((n, alphas.shape[0]))
    mhi = np.ones((n, alphas.shape[0]))
    for i in range(d):
        flo = plo[alphas[:, i], :, i].T
        fhi = phi[alphas[:, i], :, i].T
        mlo, mhi = _interval_mul(mlo, mhi, flo, fhi)
    return mlo, mhi


def interval_linear(coeffs: np.ndarray, mlo: np.ndarray, mhi: np.ndarray):
    """Enclosure of coeffs @ m for m in the box [mlo, mhi]; shapes (n, k)."""
    cp = np.clip(coeffs, 0, None)
    cn = np.clip(coeffs, None, 0)
    lo = mlo @ cp.T + mhi @ cn.T
    hi = mhi @ cp.T + mlo @ cn.T
    return lo, hi


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            key = tuple(x + y for x, y in zip(ka, kb))
            out[key] = out.get(key, 0.0) + va * vb
    return out


def substitution_matrix(T: np.ndarray, degree: int) -> np.ndarray:
    """Matrix L with monomials(T x) = L @ monomials(x).

    ``T`` maps R^d_in -> R^d_out; L has shape (D_out, D_in).
    """
    T = np.asarray(T, dtype=float)
    d_out, d_in = T.shape
    out_alphas = multi_indices(d_out, degree)
    in_lookup = index_lookup(d_in, degree)
    eye = np.eye(d_in, dtype=np.int64)
    forms = [{tuple(eye[l]): T[i, l] for l in range(d_in) if T[i, l] != 0.0} for i in range(d_out)]
    power_cache: dict = {}

    def power(i, e):
        key = (i, e)
        if key not in power_cache:
            if e == 0:
                power_cache[key] = {(0,) * d_in: 1.0}
            else:
                power_cache[key] = _poly_mul(power(i, e - 1), forms[i])
        return power_cache[key]

    L = np.zeros((out_alphas.shape[0], num_monomials(d_in, degree)))
    for row, beta in enumerate(out_alphas):
        poly = {(0,) * d_in: 1.0}
        for i in range(d_out):
            if beta[i]:
                poly = _poly_mul(poly, power(i, int(beta[i])))
        for key, val in poly.items():
            L[row, in_lookup[key]] += val
    return L
