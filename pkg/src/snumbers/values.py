"""Interval-valued results and optimizer budgets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any


class BudgetExhausted(RuntimeError):
    """A certified computation ran out of budget before closing its interval."""


@dataclass(frozen=True)
class OptimizerBudget:
    starts: int = 32            # sphere ascent restarts
    minimax_starts: int = 3     # restarts of the rank-constrained searches
    net_delta: float | None = None  # None: 0.05 for dim <= 2, 0.1 above
    max_iters: int = 500
    tolerance: float = 1e-3     # relative duality gap for pi_s
    cert_rtol: float = 1e-7     # relative closing tolerance of certified sups
    cert_atol: float = 1e-11
    max_cells: int = 3_000_000
    exchange_rounds: int = 4
    alt_iters: int = 25

    def delta_for(self, dim: int) -> float:
        if self.net_delta is not None:
            return self.net_delta
        return 0.05 if dim <= 2 else 0.1

    def with_(self, **kw) -> "OptimizerBudget":
        return replace(self, **kw)


DEFAULT_BUDGET = OptimizerBudget()


@dataclass
class CertifiedValue:
    lo: float
    hi: float
    lo_certified: bool = False
    hi_certified: bool = False
    note: str = ""
    converged: bool = True
    witness: Any = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.lo = float(self.lo)
        self.hi = float(self.hi)
        if self.lo > self.hi:
            # heuristic lower endpoints never exceed a certified upper one
            if self.lo_certified and self.hi_certified and self.lo - self.hi > 1e-9 * max(1.0, abs(self.hi)):
                raise ValueError(f"certified interval is empty: [{self.lo}, {self.hi}]")
            self.lo = self.hi

    @property
    def gap(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def intersects(self, other: "CertifiedValue", slack: float = 0.0) -> bool:
        return self.lo <= other.hi + slack and other.lo <= self.hi + slack

    def scaled(self, factor: float) -> "CertifiedValue":
        f = abs(factor)
        return CertifiedValue(self.lo * f, self.hi * f, self.lo_certified, self.hi_certified,
                              self.note, self.converged)

    @classmethod
    def exact(cls, value: float, note: str = "exact") -> "CertifiedValue":
        return cls(value, value, True, True, note)

    @classmethod
    def zero(cls, note: str = "rank property") -> "CertifiedValue":
        return cls.exact(0.0, note)

    def as_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "lo_certified": self.lo_certified,
                "hi_certified": self.hi_certified, "note": self.note,
                "converged": self.converged}


def relation_slack(*values: CertifiedValue) -> float:
    """Default verdict slack: max(1e-6, 2 x the summed certification gaps)."""
    total = sum(v.gap for v in values if math.isfinite(v.gap))
    return max(1e-6, 2.0 * total)
