"""Residual bookkeeping for operator-identity checks."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


@dataclass
class Check:
    name: str
    residual: float
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "residual": self.residual, "tol": self.tol, "pass": self.passed}


@dataclass
class RelationReport:
    """Named residuals with a pass flag each; the report passes iff all do."""

    checks: list[Check] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, name: str, residual: float, tol: float) -> Check:
        residual = float(residual)
        check = Check(name, residual, float(tol), bool(residual <= tol))
        self.checks.append(check)
        return check

    def add_nonzero(self, name: str, magnitude: float, tol: float) -> Check:
        """Record a check that *fails* when ``magnitude`` is below ``tol``."""
        magnitude = float(magnitude)
        check = Check(name, magnitude, float(tol), bool(magnitude > tol))
        self.checks.append(check)
        return check

    def extend(self, other: "RelationReport", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.residual, c.tol, c.passed))
        self.notes.extend(other.notes)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {"checks": [c.to_dict() for c in self.checks], "pass": self.passed, "notes": list(self.notes)}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def max_abs(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def block_residual(lhs, rhs, m: int, relative: bool = False) -> float:
    """Max abs entry of ``lhs - rhs`` on the leading ``m x m`` block.

    With ``relative`` the result is divided by ``max(1, max|rhs|)`` so that
    identities between high-order products are judged against their scale.
    """
    lhs = np.asarray(lhs)[:m, :m]
    rhs = np.asarray(rhs)[:m, :m]
    res = max_abs(lhs - rhs)
    return res / max(1.0, max_abs(rhs)) if relative else res


def scaled_residual(diff, scale, m: int) -> float:
    """Max over the leading block of ``|diff| / max(1, scale)``, entry by entry.

    ``scale`` should bound the magnitudes combined into each entry (for
    example ``|A||B| + |B||A|`` for a commutator), so the result measures
    error in units of those magnitudes.
    """
    diff = np.abs(np.asarray(diff)[:m, :m])
    scale = np.maximum(1.0, np.abs(np.asarray(scale)[:m, :m]))
    return float(np.max(diff / scale)) if diff.size else 0.0
