"""Unitary irreducible representations of the GDOA realization.

Only representations with a nondegenerate number-operator spectrum are
considered.  They are bounded from below (``BFB``, infinite dimensional) or
finite dimensional (``FD``) with dimension ``d <= lam - 1``.

A lowest weight ``n0`` with grade ``mu0 = n0 mod lam`` fixes the Casimir
eigenvalue through ``lambda_0 = 0``; unitarity then only depends on the
signs of ``lambda_1 .. lambda_(lam-1)``, which can be read off differences of
``beta_bar``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .algebra import TOL, AlgebraParams, grade, structure_function
from .errors import InvalidParameters, UnitarityViolation

BFB = "BFB"
FD = "FD"

# beta_bar differences closer than this to a threshold get flagged.
NEAR_BOUNDARY = 1e-9


@dataclass(frozen=True)
class Unirrep:
    kind: str
    n0: int
    mu0: int
    c: float
    d: Optional[int] = None
    near_boundary: bool = False

    @property
    def label(self) -> str:
        return BFB if self.kind == BFB else f"FD(d={self.d})"

    def to_dict(self) -> dict:
        return {
            "type": self.kind,
            "d": self.d,
            "n0": self.n0,
            "mu0": self.mu0,
            "c": self.c,
            "near_boundary": self.near_boundary,
        }


@dataclass(frozen=True)
class NoUnirrep:
    """No unirrep has lowest weight ``n0``; ``level`` is the first negative lambda_n."""

    n0: int
    mu0: int
    level: int
    near_boundary: bool = False

    label = "none"

    def to_dict(self) -> dict:
        return {"type": None, "n0": self.n0, "mu0": self.mu0, "first_negative_level": self.level,
                "near_boundary": self.near_boundary}


@dataclass(frozen=True)
class GeneralUnirrep:
    """Unirrep of the full algebra, labelled through a primed GDOA unirrep."""

    base: Unirrep
    r0: float
    grade_gamma: int
    c_general: float
    lowest_weight: float

    def to_dict(self) -> dict:
        return {
            "base": self.base.to_dict(),
            "r0": self.r0,
            "grade_gamma": self.grade_gamma,
            "c_general": self.c_general,
            "lowest_weight": self.lowest_weight,
        }


Classification = Union[Unirrep, NoUnirrep]


def lambda_seq(params: AlgebraParams, c: float, n0: int, n: int) -> float:
    """lambda_n = F(n0 + n) - c, the eigenvalue of a^dagger a on level n."""
    if n < 0:
        raise InvalidParameters("n must be nonnegative")
    return structure_function(params, n0 + n) - c


def _offset_gap(params: AlgebraParams, mu0: int, n: int) -> float:
    """beta_bar form of lambda_n / lam for a lowest weight of grade mu0."""
    lam = params.lam
    bb = params.beta_bar
    nu = mu0 + n
    if nu < lam:
        return bb[nu] - bb[mu0]
    return bb[nu - lam] - bb[mu0] + 1.0


def classify_gdoa(params: AlgebraParams, n0: int, tol: float = TOL) -> Classification:
    """Classify the unirrep with lowest N eigenvalue ``n0`` from closed-form conditions."""
    lam = params.lam
    mu0 = grade(n0, lam)
    near = False
    for n in range(1, lam):
        x = _offset_gap(params, mu0, n)
        if tol < abs(x) <= NEAR_BOUNDARY:
            near = True
        if x > tol:
            continue
        if abs(x) <= tol:
            d = n
            if mu0 <= lam - d - 1:
                c = n0 + params.beta[mu0]
            else:
                c = n0 + d + params.beta[mu0 - lam + d]
            return Unirrep(FD, n0, mu0, float(c), d, near)
        return NoUnirrep(n0, mu0, n, near)
    return Unirrep(BFB, n0, mu0, float(n0 + params.beta[mu0]), None, near)


def classify_oracle(params: AlgebraParams, n0: int, horizon: int, tol: float = TOL) -> Classification:
    """Brute-force classification by scanning lambda_n = F(n0 + n) - F(n0)."""
    lam = params.lam
    if horizon < lam:
        raise InvalidParameters(f"horizon must be >= lambda ({lam}), got {horizon}")
    mu0 = grade(n0, lam)
    c = structure_function(params, n0)
    for n in range(1, horizon + 1):
        ln = structure_function(params, n0 + n) - c
        if ln > tol:
            continue
        if abs(ln) <= tol:
            return Unirrep(FD, n0, mu0, float(c), n)
        return NoUnirrep(n0, mu0, n)
    return Unirrep(BFB, n0, mu0, float(c))


def same_classification(a: Classification, b: Classification, ctol: float = 1e-9) -> bool:
    if isinstance(a, NoUnirrep) or isinstance(b, NoUnirrep):
        return isinstance(a, NoUnirrep) and isinstance(b, NoUnirrep) and a.n0 == b.n0
    return a.kind == b.kind and a.d == b.d and a.n0 == b.n0 and abs(a.c - b.c) <= ctol


def normalization(params: AlgebraParams, c: float, n0: int, n: int, tol: float = TOL) -> float:
    """Squared norm prod_{i=1..n} lambda_i of (a^dagger)^n |c, n0>."""
    if n < 0:
        raise InvalidParameters("n must be nonnegative")
    value = 1.0
    for i in range(1, n + 1):
        li = lambda_seq(params, c, n0, i)
        if li < -tol:
            raise UnitarityViolation(f"lambda_{i} = {li:.6g} < 0 (c={c}, n0={n0})")
        value *= li
    return value


def normalization_gamma(params: AlgebraParams, n0: int, n: int) -> float:
    """Gamma-function form of the BFB normalization with c = F(n0).

    Valid only where every gamma argument is positive, which is exactly the
    BFB unitarity region; raises :class:`InvalidParameters` elsewhere.
    """
    lam = params.lam
    mu0 = grade(n0, lam)
    k, mu = divmod(n, lam)
    diff = params.beta_bar - params.beta_bar[mu0]

    num = []
    if mu <= lam - mu0 - 1:
        num += [diff[nu] + k + 1 for nu in range(0, mu0 + mu + 1)]
        num += [diff[nu] + k for nu in range(mu0 + mu + 1, lam)]
    else:
        num += [diff[nu] + k + 2 for nu in range(0, mu0 + mu - lam + 1)]
        num += [diff[nu] + k + 1 for nu in range(mu0 + mu - lam + 1, lam)]
    den = [diff[nu] + 1 for nu in range(0, mu0 + 1)]
    den += [diff[nu] for nu in range(mu0 + 1, lam)]

    if min(num + den) <= 0:
        raise InvalidParameters("gamma form used outside the BFB region")
    log_value = n * math.log(lam) + sum(math.lgamma(x) for x in num) - sum(math.lgamma(x) for x in den)
    return math.exp(log_value)


def fock_exists(params: AlgebraParams, tol: float = TOL) -> bool:
    """True iff the bosonic Fock unirrep (c = n0 = 0, BFB) exists."""
    partial = np.cumsum(params.alpha)[:-1]
    bounds = -np.arange(1, params.lam, dtype=float)
    return bool(np.all(partial - bounds > tol))


def map_general_unirrep(params: AlgebraParams, r0: float, grade_gamma: int, n0: int,
                        tol: float = TOL) -> Union[GeneralUnirrep, NoUnirrep]:
    """Label a unirrep of the full algebra by (r0, grade_gamma, n0).

    The lowest N eigenvalue is ``n0 + r0``.  The primed GDOA has its alphas
    cyclically shifted by ``grade_gamma``; its Casimir eigenvalue ``c'`` relates
    to the unprimed one by ``c = c' + r0 + beta[grade_gamma]``.
    """
    if not (0.0 <= r0 < 1.0):
        raise InvalidParameters(f"r0 must lie in [0, 1), got {r0}")
    if not (0 <= grade_gamma < params.lam):
        raise InvalidParameters(f"grade_gamma must lie in 0..{params.lam - 1}")
    base = classify_gdoa(params.shifted(grade_gamma), n0, tol)
    if isinstance(base, NoUnirrep):
        return base
    c_general = base.c + r0 + params.beta[grade_gamma]
    return GeneralUnirrep(base, float(r0), int(grade_gamma), float(c_general), n0 + r0)


# ---------------------------------------------------------------------------
# Classification tables for lam = 2, 3, 4, transcribed row by row.
# Conditions and Casimir values are linear in a0 .. a(lam-2); "=" rows are
# the measure-zero FD boundaries.

_TABLE_SOURCE = {
    2: [
        ("BFB", None, 0, "n0", ["a0 > -1"]),
        ("BFB", None, 1, "n0 + a0", ["a0 < 1"]),
        ("FD", 1, 0, "n0", ["a0 = -1"]),
        ("FD", 1, 1, "n0 + 1", ["a0 = 1"]),
    ],
    3: [
        ("BFB", None, 0, "n0", ["a0 > -1", "a1 > -2 - a0"]),
        ("BFB", None, 1, "n0 + a0", ["a0 < 2", "a1 > -1"]),
        ("BFB", None, 2, "n0 + a0 + a1", ["a0 < 1 - a1", "a1 < 2"]),
        ("FD", 1, 0, "n0", ["a0 = -1"]),
        ("FD", 1, 1, "n0 + a0", ["a1 = -1"]),
        ("FD", 1, 2, "n0 + 1", ["a1 = 1 - a0"]),
        ("FD", 2, 0, "n0", ["a0 > -1", "a1 = -2 - a0"]),
        ("FD", 2, 1, "n0 + 2", ["a0 = 2", "a1 > -1"]),
        ("FD", 2, 2, "n0 + a0 + 2", ["a0 < -1", "a1 = 2"]),
    ],
    4: [
        ("BFB", None, 0, "n0", ["a0 > -1", "a1 > -2 - a0", "a2 > -3 - a0 - a1"]),
        ("BFB", None, 1, "n0 + a0", ["a0 < 3", "a1 > -1", "a2 > -2 - a1"]),
        ("BFB", None, 2, "n0 + a0 + a1", ["a0 < 2 - a1", "a1 < 3", "a2 > -1"]),
        ("BFB", None, 3, "n0 + a0 + a1 + a2", ["a0 < 1 - a1 - a2", "a1 < 2 - a2", "a2 < 3"]),
        ("FD", 1, 0, "n0", ["a0 = -1"]),
        ("FD", 1, 1, "n0 + a0", ["a1 = -1"]),
        ("FD", 1, 2, "n0 + a0 + a1", ["a2 = -1"]),
        ("FD", 1, 3, "n0 + 1", ["a2 = 1 - a0 - a1"]),
        ("FD", 2, 0, "n0", ["a0 > -1", "a1 = -2 - a0"]),
        ("FD", 2, 1, "n0 + a0", ["a1 > -1", "a2 = -2 - a1"]),
        ("FD", 2, 2, "n0 + 2", ["a1 = 2 - a0", "a2 > -1"]),
        ("FD", 2, 3, "n0 + a0 + 2", ["a0 < -1", "a2 = 2 - a1"]),
        ("FD", 3, 0, "n0", ["a0 > -1", "a1 > -2 - a0", "a2 = -3 - a0 - a1"]),
        ("FD", 3, 1, "n0 + 3", ["a0 = 3", "a1 > -1", "a2 > -2 - a1"]),
        ("FD", 3, 2, "n0 + a0 + 3", ["a0 < -1", "a1 = 3", "a2 > -1"]),
        ("FD", 3, 3, "n0 + a0 + a1 + 3", ["a0 < -2 - a1", "a1 < -1", "a2 = 3"]),
    ],
}

_TERM = re.compile(r"([+-])?\s*(\d+(?:\.\d*)?)?\s*\*?\s*(n0|a\d+)?")


def _parse_linear(expr: str, nvars: int) -> tuple[float, np.ndarray, float]:
    """Parse ``const + sum coeff*a_i (+ n0)`` into (const, coeffs, n0 coefficient)."""
    const = 0.0
    coeffs = np.zeros(nvars)
    n0_coeff = 0.0
    pos = 0
    expr = expr.strip()
    while pos < len(expr):
        m = _TERM.match(expr, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse {expr!r} at {pos}")
        sign = -1.0 if m.group(1) == "-" else 1.0
        num = float(m.group(2)) if m.group(2) else None
        var = m.group(3)
        if var is None:
            if num is None:
                raise ValueError(f"dangling sign in {expr!r}")
            const += sign * num
        elif var == "n0":
            n0_coeff += sign * (num if num is not None else 1.0)
        else:
            coeffs[int(var[1:])] += sign * (num if num is not None else 1.0)
        pos = m.end()
        while pos < len(expr) and expr[pos] == " ":
            pos += 1
    return const, coeffs, n0_coeff


@dataclass(frozen=True)
class Condition:
    """``coeffs . a + const  <op>  0`` with op one of '>', '<', '='."""

    text: str
    coeffs: tuple
    const: float
    op: str

    def value(self, free_alpha) -> float:
        return float(np.dot(self.coeffs, free_alpha) + self.const)

    def holds(self, free_alpha, tol: float = TOL) -> bool:
        v = self.value(free_alpha)
        if self.op == ">":
            return v > tol
        if self.op == "<":
            return v < -tol
        return abs(v) <= tol

    @classmethod
    def parse(cls, text: str, nvars: int) -> "Condition":
        for op in (">", "<", "="):
            if op in text:
                lhs, rhs = text.split(op)
                break
        else:
            raise ValueError(f"no relation in {text!r}")
        c1, v1, _ = _parse_linear(lhs, nvars)
        c2, v2, _ = _parse_linear(rhs, nvars)
        return cls(text, tuple((v1 - v2).tolist()), c1 - c2, op)


@dataclass(frozen=True)
class TableRow:
    kind: str
    d: Optional[int]
    residue: int
    c_text: str
    c_const: float
    c_coeffs: tuple
    conditions: tuple

    @property
    def label(self) -> str:
        return BFB if self.kind == BFB else f"FD(d={self.d})"

    def matches(self, free_alpha, tol: float = TOL) -> bool:
        return all(cond.holds(free_alpha, tol) for cond in self.conditions)

    def casimir(self, free_alpha, n0: int) -> float:
        return n0 + self.c_const + float(np.dot(self.c_coeffs, free_alpha))

    def n0_pattern(self, lam: int) -> str:
        return f"{lam}k0" if self.residue == 0 else f"{lam}k0 + {self.residue}"

    def to_dict(self, lam: int) -> dict:
        return {
            "type": self.kind,
            "d": self.d,
            "n0": self.n0_pattern(lam),
            "residue": self.residue,
            "c": self.c_text,
            "conditions": [
                {"text": c.text, "coeffs": list(c.coeffs), "const": c.const, "op": c.op}
                for c in self.conditions
            ],
        }


def table_rows(lam: int) -> list[TableRow]:
    if lam not in _TABLE_SOURCE:
        raise InvalidParameters(f"tables exist for lambda in (2, 3, 4), got {lam}")
    nvars = lam - 1
    rows = []
    for kind, d, residue, c_text, conds in _TABLE_SOURCE[lam]:
        c_const, c_coeffs, _ = _parse_linear(c_text, nvars)
        rows.append(TableRow(kind, d, residue, c_text, c_const, tuple(c_coeffs.tolist()),
                             tuple(Condition.parse(t, nvars) for t in conds)))
    return rows


def table_report(lam: int) -> dict:
    """JSON-ready classification table for ``lam`` in {2, 3, 4}."""
    rows = table_rows(lam)
    return {"lambda": lam, "variables": [f"a{i}" for i in range(lam - 1)],
            "rows": [r.to_dict(lam) for r in rows]}


def matching_rows(lam: int, free_alpha, residue: int, tol: float = TOL) -> list[TableRow]:
    return [r for r in table_rows(lam) if r.residue == residue and r.matches(free_alpha, tol)]


def sample_row_alpha(row: TableRow, rng: np.random.Generator, low: float = -4.0, high: float = 4.0,
                     margin: float = 1e-6, max_tries: int = 100_000) -> np.ndarray:
    """Draw free alphas satisfying a table row's predicate.

    Inequalities are met with at least ``margin`` to stay clear of other
    rows' boundaries; an equality is solved exactly for its last variable.
    """
    nvars = len(row.c_coeffs)
    equalities = [c for c in row.conditions if c.op == "="]
    inequalities = [c for c in row.conditions if c.op != "="]
    for _ in range(max_tries):
        x = rng.uniform(low, high, size=nvars)
        for eq in equalities:
            coeffs = np.asarray(eq.coeffs)
            j = int(np.flatnonzero(coeffs)[-1])
            rest = float(np.dot(np.delete(coeffs, j), np.delete(x, j))) + eq.const
            x[j] = -rest / coeffs[j]
        if all(c.holds(x, margin) for c in inequalities):
            return x
    raise RuntimeError(f"could not sample row {row.label} residue {row.residue}")
