"""Instance files: a small YAML dialect for homogeneous polynomials.

Grammar (every key required unless marked optional)::

    name: <identifier>
    degree: <m>                     # 1 <= m <= 4
    domain: {dim: <d>, p: <1|2|inf>}
    codomain: {dim: <k>, p: <1|2|inf>}
    coefficients:                   # one entry per nonzero coefficient
      - [<j>, [<a_1>, ..., <a_d>], <value>]
    expected:                       # optional
      - {quantity: <str>, n: <int>, value: <float>, provenance: <str>}

``j`` is the 0-based output coordinate and ``a`` the exponent vector with
sum m.  A pair (j, a) may appear at most once.  Numbers are written with 17
significant digits so that serialize(parse(text)) is a fixed point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import yaml

from ..poly import HomPoly
from ..spaces import DEFAULT_MAX_DEGREE, LpSpace, format_p, max_dim, parse_p

MALFORMED_MULTIINDEX = "MALFORMED_MULTIINDEX"
DIMENSION_OVERFLOW = "DIMENSION_OVERFLOW"
DUPLICATE_COEFF = "DUPLICATE_COEFF"
MALFORMED_INSTANCE = "MALFORMED_INSTANCE"


class InstanceError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass(frozen=True)
class SpaceSpec:
    dim: int
    p: float

    def space(self) -> LpSpace:
        return LpSpace(self.dim, self.p)


@dataclass
class InstanceSpec:
    name: str
    domain: SpaceSpec
    codomain: SpaceSpec
    degree: int
    coefficients: list[tuple[int, tuple[int, ...], float]]
    expected: list[dict] = field(default_factory=list)

    def to_poly(self) -> HomPoly:
        terms = {(j, a): v for j, a, v in self.coefficients}
        return HomPoly.from_terms(self.degree, self.domain.space(), self.codomain.space(), terms)

    @classmethod
    def from_poly(cls, name: str, P: HomPoly, expected: list[dict] | None = None) -> "InstanceSpec":
        coeffs = [(j, a, v) for (j, a), v in P.terms().items()]
        return cls(name, SpaceSpec(P.domain.dim, P.domain.p), SpaceSpec(P.codomain.dim, P.codomain.p),
                   P.degree, coeffs, list(expected or []))


def _num(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(float(v), ".17g")


def _space(raw, what: str) -> SpaceSpec:
    if not isinstance(raw, dict) or set(raw) != {"dim", "p"}:
        raise InstanceError(MALFORMED_INSTANCE, f"{what} must be a mapping with keys dim and p")
    try:
        dim = int(raw["dim"])
        p = parse_p(raw["p"])
    except (TypeError, ValueError) as exc:
        raise InstanceError(MALFORMED_INSTANCE, f"{what}: {exc}") from None
    if dim < 1:
        raise InstanceError(MALFORMED_INSTANCE, f"{what}: dim must be positive")
    if dim > max_dim():
        raise InstanceError(DIMENSION_OVERFLOW, f"{what}: dim {dim} exceeds the maximum {max_dim()} (SNUM_MAX_DIM)")
    return SpaceSpec(dim, p)


def parse_instance(text: str) -> InstanceSpec:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise InstanceError(MALFORMED_INSTANCE, f"not valid YAML: {exc}") from None
    return instance_from_mapping(raw)


def instance_from_mapping(raw) -> InstanceSpec:
    if not isinstance(raw, dict):
        raise InstanceError(MALFORMED_INSTANCE, "top level must be a mapping")
    missing = {"name", "degree", "domain", "codomain", "coefficients"} - set(raw)
    if missing:
        raise InstanceError(MALFORMED_INSTANCE, f"missing keys: {', '.join(sorted(missing))}")
    unknown = set(raw) - {"name", "degree", "domain", "codomain", "coefficients", "expected"}
    if unknown:
        raise InstanceError(MALFORMED_INSTANCE, f"unknown keys: {', '.join(sorted(unknown))}")
    name = str(raw["name"])
    degree = raw["degree"]
    if not isinstance(degree, int) or degree < 1:
        raise InstanceError(MALFORMED_INSTANCE, "degree must be a positive integer")
    if degree > DEFAULT_MAX_DEGREE:
        raise InstanceError(DIMENSION_OVERFLOW, f"degree {degree} exceeds the maximum {DEFAULT_MAX_DEGREE}")
    dom = _space(raw["domain"], "domain")
    cod = _space(raw["codomain"], "codomain")
    entries = raw["coefficients"] or []
    if not isinstance(entries, list):
        raise InstanceError(MALFORMED_INSTANCE, "coefficients must be a list")
    coeffs, seen = [], set()
    for e in entries:
        if not isinstance(e, list) or len(e) != 3 or not isinstance(e[1], list):
            raise InstanceError(MALFORMED_INSTANCE, f"coefficient entry {e!r} is not [j, [alpha], value]")
        j, alpha, value = e
        if not isinstance(j, int) or isinstance(j, bool):
            raise InstanceError(MALFORMED_INSTANCE, f"output index {j!r} is not an integer")
        if not 0 <= j < cod.dim:
            raise InstanceError(DIMENSION_OVERFLOW, f"output index {j} outside codomain of dim {cod.dim}")
        if (len(alpha) != dom.dim or not all(isinstance(a, int) and not isinstance(a, bool) and a >= 0
                                             for a in alpha) or sum(alpha) != degree):
            raise InstanceError(MALFORMED_MULTIINDEX,
                                f"multi-index {alpha} needs {dom.dim} nonnegative integers summing to {degree}")
        key = (j, tuple(alpha))
        if key in seen:
            raise InstanceError(DUPLICATE_COEFF, f"coefficient ({j}, {list(alpha)}) given twice")
        seen.add(key)
        try:
            v = float(value)
        except (TypeError, ValueError):
            raise InstanceError(MALFORMED_INSTANCE, f"coefficient value {value!r} is not a number") from None
        if not math.isfinite(v):
            raise InstanceError(MALFORMED_INSTANCE, "coefficient values must be finite")
        coeffs.append((j, tuple(alpha), v))
    expected = raw.get("expected") or []
    if not isinstance(expected, list) or not all(isinstance(x, dict) for x in expected):
        raise InstanceError(MALFORMED_INSTANCE, "expected must be a list of mappings")
    return InstanceSpec(name, dom, cod, degree, coeffs, [dict(x) for x in expected])


def _expected_item(d: dict) -> str:
    parts = []
    for k in sorted(d):
        v = d[k]
        if isinstance(v, float):
            parts.append(f"{k}: {_num(v)}")
        elif isinstance(v, (int, bool)) or v is None:
            parts.append(f"{k}: {yaml.safe_dump(v).splitlines()[0]}")
        else:
            parts.append(f"{k}: {yaml.safe_dump(str(v), default_style=None).splitlines()[0]}")
    return "  - {" + ", ".join(parts) + "}"


def serialize_instance(spec: InstanceSpec) -> str:
    """Canonical text: coefficients sorted by (j, alpha descending), 17 significant digits."""
    lines = [
        f"name: {yaml.safe_dump(spec.name).splitlines()[0]}",
        f"degree: {spec.degree}",
        f"domain: {{dim: {spec.domain.dim}, p: {format_p(spec.domain.p)}}}",
        f"codomain: {{dim: {spec.codomain.dim}, p: {format_p(spec.codomain.p)}}}",
    ]
    entries = sorted(spec.coefficients, key=lambda e: (e[0], tuple(-a for a in e[1])))
    if entries:
        lines.append("coefficients:")
        for j, a, v in entries:
            lines.append(f"  - [{j}, [{', '.join(str(int(t)) for t in a)}], {_num(v)}]")
    else:
        lines.append("coefficients: []")
    if spec.expected:
        lines.append("expected:")
        lines.extend(_expected_item(d) for d in spec.expected)
    return "\n".join(lines) + "\n"


def normalize_instance_text(text: str) -> str:
    return serialize_instance(parse_instance(text))


def load_instance(path) -> InstanceSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def parse_instances(text: str) -> list[InstanceSpec]:
    """One instance, several '---'-separated documents, or a mapping with an ``instances:`` list."""
    try:
        docs = [d for d in yaml.safe_load_all(text) if d is not None]
    except yaml.YAMLError as exc:
        raise InstanceError(MALFORMED_INSTANCE, f"not valid YAML: {exc}") from None
    if len(docs) == 1 and isinstance(docs[0], dict) and set(docs[0]) == {"instances"}:
        docs = docs[0]["instances"] or []
    return [instance_from_mapping(d) for d in docs]


def serialize_instances(specs: list[InstanceSpec]) -> str:
    return "---\n".join(serialize_instance(s) for s in specs)


def load_instances(path) -> list[InstanceSpec]:
    with open(path, encoding="utf-8") as fh:
        return parse_instances(fh.read())


def coefficient_matrix(spec: InstanceSpec) -> np.ndarray:
    return spec.to_poly().coeffs
