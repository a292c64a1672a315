from __future__ import annotations

import math

import numpy as np
import pytest

from conftest import random_poly
from snumbers.certify import certified_sup, certified_sup_functionals, polygon_patches
from snumbers.oracle import grid_norm, grid_upper
from snumbers.spaces import ALLOWED_P

INF = math.inf


@pytest.mark.parametrize("p", ALLOWED_P)
@pytest.mark.parametrize("m", [2, 3])
def test_sup_encloses_grid_oracle(p, m):
    P = random_poly(5, d=2, k=2, m=m, p=p, q=2)
    r = certified_sup(P.coeffs, m, p, 2.0)
    assert r.converged and r.lo <= r.hi
    assert grid_norm(P).value <= r.hi + 1e-9
    assert r.lo <= grid_upper(P.coeffs, m, p, 2.0, 2, 4001) + 1e-9
    assert np.linalg.norm(P(r.argmax)) == pytest.approx(r.lo, rel=1e-9)


def test_sup_in_three_variables():
    P = random_poly(8, d=3, k=2, m=2, p=1, q=INF)
    r = certified_sup(P.coeffs, 2, 1.0, INF)
    g = grid_norm(P, resolution=200)
    assert g.value <= r.hi + 1e-9 and r.hi - r.lo <= 1e-5 * r.hi   # closing tolerance in three variables


@pytest.mark.parametrize("q", [1.0, INF])
def test_functional_splitting_matches_polyhedral_norm(q):
    P = random_poly(9, d=2, k=2, m=2, p=2, q=q)
    G = np.array([[1.0, 1.0], [1.0, -1.0]]) if q == 1.0 else np.eye(2)
    a = certified_sup_functionals(P.coeffs, 2, 2.0, G)
    b = certified_sup(P.coeffs, 2, 2.0, q)
    assert max(a.lo, b.lo) <= min(a.hi, b.hi) + 1e-9


def test_sup_over_polygon_patches():
    # conv of the four unit vectors of l_1^2 is the l_1 ball itself
    V = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    P = random_poly(4, d=2, k=2, m=2, p=1, q=2)
    a = certified_sup(P.coeffs, 2, 1.0, 2.0, patches=polygon_patches(V))
    b = certified_sup(P.coeffs, 2, 1.0, 2.0)
    assert max(a.lo, b.lo) <= min(a.hi, b.hi) + 1e-9
