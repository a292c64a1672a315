from __future__ import annotations

import math

import numpy as np
import pytest

from snumbers import HomPoly, LinearMap, LpSpace
from snumbers.oracle import (
    distance_to_line,
    exhaustive_minimax,
    grid_norm,
    grid_upper,
    hull_hausdorff,
    net_coverage,
    svd_singular_values,
)
from snumbers.spaces import ALLOWED_P


def _xy(p: float) -> HomPoly:
    return HomPoly.from_terms(2, LpSpace(2, p), LpSpace(1, 2.0), {(0, (1, 1)): 1.0})


def test_svd_of_rotated_diagonal():
    t = 0.3
    R = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
    s = svd_singular_values(R @ np.diag([3.0, 1.0]) @ R.T)
    assert np.allclose(s, [3.0, 1.0], atol=1e-12)
    with pytest.raises(ValueError):
        svd_singular_values(LinearMap(LpSpace(2, 1.0), LpSpace(2, 2.0), np.eye(2)))


@pytest.mark.parametrize("p,exact", [(1.0, 0.25), (2.0, 0.5), (math.inf, 1.0)])
def test_grid_norm_of_xy(p, exact):
    # |x1 x2| on the unit sphere peaks at |x1| = |x2|
    o = grid_norm(_xy(p), resolution=400)
    assert o.bound == "lower" and o.value <= exact + 1e-12 and o.value == pytest.approx(exact, abs=1e-9)
    up = grid_upper(_xy(p).coeffs, 2, p, 2.0, 2, 4001)
    assert exact <= up <= exact + 5e-2


@pytest.mark.parametrize("p,exact", [(1.0, 1.0), (2.0, 1 / math.sqrt(2)), (math.inf, 0.5)])
def test_distance_to_line(p, exact):
    # dist((1, 0), span (1, 1)): min over t of |(1 - t, -t)|_p
    assert distance_to_line(np.array([1.0, 0.0]), np.array([1.0, 1.0]), p).value == pytest.approx(exact, abs=1e-8)


def test_net_coverage_of_circle_net():
    t = np.pi * np.arange(8) / 8
    net = np.column_stack([np.cos(t), np.sin(t)])
    o = net_coverage(net, 2.0, samples=20_000)
    chord = 2 * math.sin(math.pi / 32)      # half the angular step of the 16-point symmetric net
    assert chord * 0.97 <= o.value <= chord + 1e-12


def test_hull_hausdorff():
    E = np.eye(2)
    assert hull_hausdorff(E, 1.0).value == pytest.approx(0.0, abs=1e-12)
    # conv(+-e_i) is the l_1 ball; the l_inf ball reaches sqrt 2 along the diagonal, the hull 1/sqrt 2
    assert hull_hausdorff(E, math.inf, delta=math.pi / 400).value == pytest.approx(math.sqrt(2) / 2, abs=1e-6)


@pytest.mark.parametrize("p", ALLOWED_P)
def test_exhaustive_minimax_rank_one_is_zero(p):
    P = HomPoly.from_terms(2, LpSpace(2, p), LpSpace(2, 1.0), {(0, (2, 0)): 1.0, (1, (2, 0)): -2.0,
                                                            (0, (1, 1)): 0.5, (1, (1, 1)): -1.0})
    o = exhaustive_minimax(P, 2)
    assert o.bound == "upper" and o.value <= 1e-6
    assert exhaustive_minimax(P, 1).value >= grid_norm(P).value - 1e-12


def test_exhaustive_minimax_shape_guard():
    P = HomPoly.from_terms(3, LpSpace(2, 2.0), LpSpace(2, 2.0), {(0, (3, 0)): 1.0})
    with pytest.raises(ValueError):
        exhaustive_minimax(P, 2)
    with pytest.raises(ValueError):
        exhaustive_minimax(_xy(2.0), 3)
