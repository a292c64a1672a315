from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from snumbers import HomPoly, LpSpace

settings.register_profile("default", deadline=None, max_examples=25, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

INF = math.inf


def random_poly(seed: int, d: int = 2, k: int = 2, m: int = 2, p: float = 2.0, q: float = 2.0) -> HomPoly:
    rng = np.random.default_rng(seed)
    P = HomPoly.zero(m, LpSpace(d, p), LpSpace(k, q))
    return P.with_coeffs(rng.uniform(-1.0, 1.0, P.coeffs.shape))


@pytest.fixture
def quad_l2():
    """(x1^2, x2^2 / 2) on l_2^2 -> l_2^2."""
    return HomPoly.from_terms(2, LpSpace(2, 2), LpSpace(2, 2), {(0, (2, 0)): 1.0, (1, (0, 2)): 0.5})


@pytest.fixture
def mixed_inf_1():
    return HomPoly.from_terms(2, LpSpace(2, INF), LpSpace(2, 1),
                              {(0, (2, 0)): 1.0, (0, (1, 1)): -0.5, (1, (0, 2)): 0.7, (1, (1, 1)): 0.3})
