"""Seeded random instances: coefficients i.i.d. uniform[-1, 1] from PCG64."""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass

import numpy as np

from ..monomials import multi_indices
from ..spaces import ALLOWED_P, DEFAULT_MAX_DEGREE, format_p, max_dim, parse_p
from .instance import DIMENSION_OVERFLOW, InstanceError, InstanceSpec, SpaceSpec, serialize_instance

GENERATOR = "PCG64"


@dataclass(frozen=True)
class Shape:
    domain_dim: int = 2
    codomain_dim: int = 2
    degree: int = 2
    p_values: tuple[float, ...] = ALLOWED_P   # instances cycle through all (p, q) pairs

    @property
    def pairs(self) -> list[tuple[float, float]]:
        return list(itertools.product(self.p_values, repeat=2))

    @classmethod
    def parse(cls, text: str) -> "Shape":
        """'DxK:mM[:p1,p2,...]', e.g. '2x2:m2:1,2,inf'."""
        try:
            parts = text.split(":")
            d, k = (int(t) for t in parts[0].lower().split("x"))
            m = int(parts[1].lstrip("mM"))
            ps = tuple(parse_p(t) for t in parts[2].split(",")) if len(parts) > 2 else ALLOWED_P
        except (ValueError, IndexError):
            raise ValueError(f"shape {text!r} is not of the form DxK:mM[:p,...]") from None
        return cls(d, k, m, ps)

    def __str__(self):
        return f"{self.domain_dim}x{self.codomain_dim}:m{self.degree}:{','.join(format_p(p) for p in self.p_values)}"


def gen_random(seed: int, shape: Shape, count: int, prefix: str = "rand") -> list[InstanceSpec]:
    if max(shape.domain_dim, shape.codomain_dim) > max_dim():
        raise InstanceError(DIMENSION_OVERFLOW, f"dimension exceeds the maximum {max_dim()} (SNUM_MAX_DIM)")
    if not 1 <= shape.degree <= DEFAULT_MAX_DEGREE:
        raise InstanceError(DIMENSION_OVERFLOW, f"degree must lie in 1..{DEFAULT_MAX_DEGREE}")
    rng = np.random.Generator(np.random.PCG64(seed))
    alphas = [tuple(int(t) for t in a) for a in multi_indices(shape.domain_dim, shape.degree)]
    pairs = shape.pairs
    out = []
    for i in range(count):
        p, q = pairs[i % len(pairs)]
        C = rng.uniform(-1.0, 1.0, (shape.codomain_dim, len(alphas)))
        coeffs = [(j, a, float(C[j, t])) for j in range(shape.codomain_dim) for t, a in enumerate(alphas)]
        out.append(InstanceSpec(f"{prefix}-{seed}-{i:03d}", SpaceSpec(shape.domain_dim, p),
                                SpaceSpec(shape.codomain_dim, q), shape.degree, coeffs))
    return out


def content_hash(instances: list[InstanceSpec]) -> str:
    h = hashlib.sha256()
    for spec in instances:
        h.update(serialize_instance(spec).encode())
    return h.hexdigest()
