"""The record returned by every inequality check."""
from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class InequalityReport:
    """Outcome of certifying ``lhs <= constant * prod(norms)`` numerically.

    ``status`` is ``"pass"``, ``"fail"`` or ``"skipped"``; skipped reports carry
    the violated precondition in ``reason`` and NaN numbers.
    """

    name: str
    lhs: float
    constant: float
    norms: list[tuple[str, float]] = field(default_factory=list)
    rhs: float = math.nan
    ratio: float = math.nan
    tolerance: float = 0.0
    mc_margin: float = 0.0
    passed: bool = False
    status: str = "fail"
    reason: str = ""
    params: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    @classmethod
    def build(cls, name: str, lhs: float, constant: float, norms, *, tolerance: float,
              mc_margin: float = 0.0, params=None, provenance=None) -> "InequalityReport":
        norms = [(str(k), float(v)) for k, v in norms]
        rhs = float(constant)
        for _, v in norms:
            rhs *= v
        lhs = float(lhs)
        if rhs > 0:
            ratio = lhs / rhs
        else:
            ratio = 0.0 if lhs == 0 else math.inf
        ok = bool(ratio <= 1.0 + tolerance + mc_margin)
        return cls(name, lhs, float(constant), norms, rhs, ratio, float(tolerance),
                   float(mc_margin), ok, "pass" if ok else "fail", "",
                   dict(params or {}), dict(provenance or {}))

    @classmethod
    def skipped(cls, name: str, reason: str, params=None, provenance=None) -> "InequalityReport":
        nan = math.nan
        return cls(name, nan, nan, [], nan, nan, 0.0, 0.0, False, "skipped", reason,
                   dict(params or {}), dict(provenance or {}))

    @property
    def is_skipped(self) -> bool:
        return self.status == "skipped"
