"""Deformed C_lambda-extended oscillator algebras.

The commutator is replaced by the quommutator

    a a_dag - q a_dag a = H(N) + K(N) sum_mu alpha_mu P_mu,

and the third Casimir by ``C3~ = q^(-N) (D(N) + E(N) sum beta_mu P_mu - a_dag a)``.
It is a Casimir iff

    D(n+1) - q D(n) = H(n)                                 (funct1)
    E(n+1) beta_(mu+1) - q E(n) beta_mu = K(n) alpha_mu    (funct2)

with constant beta.  Three families make funct2 solvable: A (lam = 2, free
E), B (lam > 2, E = b k^n, K = B k^n) and C (any lam, E = b q^n, K = B q^n).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import TOL, AlgebraParams
from .errors import InvalidParameters, RejectedFamily, TruncationTooSmall, UnitarityViolation
from .fock import FockRep, comm, fock_from_structure
from .report import RelationReport, block_residual, scaled_residual

KINDS = ("constant", "power", "qbracket", "table")


@dataclass(frozen=True)
class ScalarSequence:
    """A real function on the nonnegative integers.

    ``constant``: v; ``power``: b * base**n; ``qbracket``:
    (q**n - q**-n) / (q - 1/q) (n at q = 1); ``table``: explicit values.
    """

    kind: str
    value: float = 0.0
    b: float = 1.0
    base: float = 1.0
    q: float = 1.0
    table: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameters(f"unknown sequence kind {self.kind!r}")
        nums = [self.value, self.b, self.base, self.q, *self.table]
        if not all(np.isfinite(nums)):
            raise InvalidParameters("sequence parameters must be finite")
        if self.kind == "qbracket" and self.q <= 0:
            raise InvalidParameters("q-bracket needs q > 0")

    @classmethod
    def constant(cls, v: float) -> "ScalarSequence":
        return cls("constant", value=float(v))

    @classmethod
    def power(cls, b: float, base: float) -> "ScalarSequence":
        return cls("power", b=float(b), base=float(base))

    @classmethod
    def qbracket(cls, q: float) -> "ScalarSequence":
        return cls("qbracket", q=float(q))

    @classmethod
    def from_values(cls, values) -> "ScalarSequence":
        return cls("table", table=tuple(float(v) for v in values))

    def __call__(self, n: int) -> float:
        if n < 0:
            raise InvalidParameters("sequences are defined on n >= 0")
        if self.kind == "constant":
            return self.value
        if self.kind == "power":
            return self.b * self.base ** n
        if self.kind == "qbracket":
            q = self.q
            return float(n) if q == 1 else (q ** n - q ** -n) / (q - 1 / q)
        if n >= len(self.table):
            raise InvalidParameters(f"table sequence has no value at n = {n}")
        return self.table[n]

    def values(self, n_max: int) -> np.ndarray:
        return np.array([self(n) for n in range(n_max + 1)])

    @property
    def n_max(self) -> Optional[int]:
        return len(self.table) - 1 if self.kind == "table" else None

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "constant":
            out["value"] = self.value
        elif self.kind == "power":
            out.update(b=self.b, base=self.base)
        elif self.kind == "qbracket":
            out["q"] = self.q
        else:
            out["values"] = list(self.table)
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "ScalarSequence":
        kind = d.get("kind")
        if kind == "constant":
            return cls.constant(d["value"])
        if kind == "power":
            return cls.power(d["b"], d["base"])
        if kind == "qbracket":
            return cls.qbracket(d["q"])
        if kind == "table":
            return cls.from_values(d["values"])
        raise InvalidParameters(f"unknown sequence kind {kind!r}")


@dataclass(frozen=True, eq=False)
class DeformedAlgebra:
    family: str
    params: AlgebraParams
    q: float
    H_seq: ScalarSequence
    E_seq: ScalarSequence
    beta_def: np.ndarray
    D0: float
    k: Optional[float] = None
    B_coeff: Optional[float] = None
    b_coeff: Optional[float] = None

    @property
    def lam(self) -> int:
        return self.params.lam

    @property
    def alpha(self) -> np.ndarray:
        return self.params.alpha

    def H(self, n: int) -> float:
        return self.H_seq(n)

    def E(self, n: int) -> float:
        return self.E_seq(n)

    def K(self, n: int) -> float:
        if self.family == "A":
            return self.E(n + 1) + self.q * self.E(n)
        base = self.k if self.family == "B" else self.q
        return self.B_coeff * base ** n

    def D_seq(self, n_max: int) -> ScalarSequence:
        return solve_D(self.q, self.H_seq, self.D0, n_max)

    def structure(self, n_max: int) -> np.ndarray:
        """F_def(n) = D(n) + E(n) beta_def[n mod lam] for n = 0..n_max."""
        d = self.D_seq(n_max).table
        return np.array([d[n] + self.E(n) * self.beta_def[n % self.lam] for n in range(n_max + 1)])

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "lambda": self.lam,
            "alpha": self.alpha.tolist(),
            "q": self.q,
            "k": self.k,
            "B": self.B_coeff,
            "b": self.b_coeff,
            "H": self.H_seq.to_dict(),
            "E": self.E_seq.to_dict(),
            "beta_def": list(map(float, self.beta_def)),
            "D0": self.D0,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DeformedAlgebra":
        return make_deformed(d["family"], d["lambda"], d["alpha"], d["q"], k=d.get("k"), B=d.get("B"),
                             b=d.get("b"), H=ScalarSequence.from_dict(d["H"]),
                             E=ScalarSequence.from_dict(d["E"]) if d["family"].upper() == "A" else None)


def _ratio_is(e: ScalarSequence, target: float, tol: float = 1e-12) -> bool:
    vals = e.values(3)
    if np.any(vals == 0):
        return False
    ratios = vals[1:] / vals[:-1]
    return bool(np.all(np.abs(ratios - target) <= tol * max(1.0, abs(target))))


def make_deformed(family: str, lam: int, alpha, q: float, *, k: Optional[float] = None,
                  B: Optional[float] = None, b: Optional[float] = None,
                  H: Optional[ScalarSequence] = None, E: Optional[ScalarSequence] = None) -> DeformedAlgebra:
    """Build a deformed algebra of family A, B or C with its constant beta.

    ``alpha`` is the full zero-sum vector of length ``lam``.  H defaults to
    the constant 1.  Family A needs ``E``; B needs ``k``, ``B``, ``b``; C
    needs ``B``, ``b``.
    """
    family = str(family).upper()
    params = AlgebraParams(int(lam), np.asarray(alpha, dtype=float))
    if not (np.isfinite(q) and q > 0):
        raise InvalidParameters(f"q must be a positive real, got {q}")
    q = float(q)
    H = ScalarSequence.constant(1.0) if H is None else H
    lam = params.lam
    alpha = params.alpha

    if family == "A":
        if lam != 2:
            raise InvalidParameters("family A needs lambda = 2")
        if E is None:
            raise InvalidParameters("family A needs an E sequence")
        if _ratio_is(E, -q):
            raise RejectedFamily("E(n) = b(-q)^n makes beta depend on n")
        if _ratio_is(E, q):
            raise InvalidParameters("E(n) = b q^n is excluded from family A")
        if E(0) == 0:
            raise InvalidParameters("E(0) must be nonzero")
        beta = -alpha
        return DeformedAlgebra("A", params, q, H, E, beta, float(alpha[0] * E(0)))

    if family == "B":
        if lam <= 2:
            raise InvalidParameters("family B needs lambda > 2")
        if k is None or B is None or b is None:
            raise InvalidParameters("family B needs k, B and b")
        if b == 0:
            raise InvalidParameters("b must be nonzero")
        if abs(k - q) <= TOL * max(1.0, q):
            raise InvalidParameters("family B needs k != q")
        if lam % 2 == 0 and abs(k + q) <= TOL * max(1.0, q):
            raise RejectedFamily("family B with even lambda needs k != -q")
        pref = B * q ** (lam - 1) / (b * (k ** lam - q ** lam))
        beta = np.array([pref * sum((k / q) ** nu * alpha[(mu + nu) % lam] for nu in range(lam))
                         for mu in range(lam)])
        E = ScalarSequence.power(b, k)
        return DeformedAlgebra("B", params, q, H, E, beta, float(-b * beta[0]), float(k), float(B), float(b))

    if family == "C":
        if B is None or b is None:
            raise InvalidParameters("family C needs B and b")
        if b == 0:
            raise InvalidParameters("b must be nonzero")
        beta = (B / (b * q)) * np.concatenate(([0.0], np.cumsum(alpha)[:-1]))
        E = ScalarSequence.power(b, q)
        return DeformedAlgebra("C", params, q, H, E, beta, 0.0, None, float(B), float(b))

    raise InvalidParameters(f"family must be A, B or C, got {family!r}")


def make_cv_algebra(q: float, alpha_hat: float) -> DeformedAlgebra:
    """Deformed Calogero-Vasiliev oscillator as a family-A member.

    H(n) = q^-n, E(n) = 2 q^-n / (q + 1/q), alpha = (alpha_hat, -alpha_hat),
    giving a a_dag - q a_dag a = q^-N (1 + 2 alpha_hat (-1)^N).
    """
    H = ScalarSequence.power(1.0, 1.0 / q)
    E = ScalarSequence.power(2.0 / (q + 1.0 / q), 1.0 / q)
    return make_deformed("A", 2, [alpha_hat, -alpha_hat], q, H=H, E=E)


def cv_D_closed_form(q: float, alpha_hat: float, n: int) -> float:
    bracket = float(n) if q == 1 else (q ** n - q ** -n) / (q - 1 / q)
    return bracket + 2 * alpha_hat * q ** n / (q + 1 / q)


def solve_D(q: float, H_seq: ScalarSequence, D0: float, n_max: int) -> ScalarSequence:
    """Iterate D(n+1) = q D(n) + H(n) from D(0) = D0."""
    if n_max < 1:
        raise InvalidParameters("n_max must be >= 1")
    d = [float(D0)]
    for n in range(n_max):
        d.append(q * d[-1] + H_seq(n))
    return ScalarSequence.from_values(d)


def _rel(x: float, *scale: float) -> float:
    return abs(x) / max(1.0, *map(abs, scale))


def funct_residuals(defa: DeformedAlgebra, n_max: int, beta=None) -> tuple[float, float]:
    """Scale-relative residuals of funct1 and funct2 over n = 0..n_max, all mu."""
    beta = defa.beta_def if beta is None else np.asarray(beta)
    d = defa.D_seq(n_max + 1).table
    q, lam = defa.q, defa.lam
    r1 = max(_rel(d[n + 1] - q * d[n] - defa.H(n), d[n + 1], q * d[n], defa.H(n)) for n in range(n_max + 1))
    r2 = 0.0
    for n in range(n_max + 1):
        e1, e0, kn = defa.E(n + 1), defa.E(n), defa.K(n)
        for mu in range(lam):
            lhs1 = e1 * beta[(mu + 1) % lam]
            lhs2 = q * e0 * beta[mu]
            rhs = kn * defa.alpha[mu]
            r2 = max(r2, _rel(lhs1 - lhs2 - rhs, lhs1, lhs2, rhs))
    return r1, r2


def beta_from_functional(defa: DeformedAlgebra, n: int) -> np.ndarray:
    """Re-solve funct2 for beta using only the sequences at level n.

    Families A and B give a nonsingular lam x lam system; for family C the
    system is singular along beta = const and beta_0 = 0 fixes it.
    """
    lam, q = defa.lam, defa.q
    e1, e0, kn = defa.E(n + 1), defa.E(n), defa.K(n)
    rhs = kn * defa.alpha
    if defa.family == "C":
        beta = np.zeros(lam)
        for mu in range(lam - 1):
            beta[mu + 1] = (rhs[mu] + q * e0 * beta[mu]) / e1
        return beta
    m = -q * e0 * np.eye(lam) + e1 * np.roll(np.eye(lam), 1, axis=1)
    return np.linalg.solve(m, rhs)


@dataclass(frozen=True, eq=False)
class DeformedRep:
    algebra: DeformedAlgebra
    rep: FockRep

    @property
    def dim(self) -> int:
        return self.rep.dim


def build_deformed_fock(defa: DeformedAlgebra, dim: int, tol: float = TOL) -> DeformedRep:
    """Fock representation with a_dag a = F_def(N); C3~ vanishes on it by construction."""
    if not isinstance(dim, (int, np.integer)) or dim <= 0 or dim % defa.lam:
        raise InvalidParameters(f"dim must be a positive multiple of lambda={defa.lam}")
    f = defa.structure(dim)
    if abs(f[0]) > tol * max(1.0, abs(defa.D0)):
        raise InvalidParameters(f"F_def(0) = {f[0]:.3g} != 0; D0 does not match beta_0")
    bad = np.flatnonzero(f[1:] <= 0)
    if bad.size:
        n = int(bad[0]) + 1
        raise UnitarityViolation(f"F_def({n}) = {f[n]:.6g} <= 0; no Fock representation")
    f[0] = 0.0
    return DeformedRep(defa, fock_from_structure(defa.params, dim, f))


def verify_deformed(drep: DeformedRep, tol: float = 1e-10) -> RelationReport:
    """Quommutator, Casimirs and functional equations on the interior block.

    Each entry's residual is divided by the magnitude of the terms combined
    into it, because D(n) and q^-n span many orders of magnitude.
    """
    defa, rep = drep.algebra, drep.rep
    if rep.dim < 3 * rep.lam:
        raise TruncationTooSmall(f"dim {rep.dim} < 3*lambda = {3 * rep.lam}")
    m = rep.interior()
    q = defa.q
    n = np.arange(rep.dim)
    a, ad = rep.a, rep.a_dag
    rpt = RelationReport(notes=[f"interior block {m} of {rep.dim}", "residuals in units of entry magnitude"])

    abs_a = np.abs(a)
    rhs = np.diag([defa.H(i) + defa.K(i) * defa.alpha[i % rep.lam] for i in n]).astype(complex)
    quom = a @ ad - q * ad @ a
    rpt.add("a a_dag - q a_dag a=H+K sum alpha P",
            scaled_residual(quom - rhs, np.abs(a @ ad) + q * np.abs(ad @ a) + np.abs(rhs), m), tol)

    d = np.asarray(defa.D_seq(rep.dim).table[:rep.dim])
    e_beta = np.array([defa.E(i) * defa.beta_def[i % rep.lam] for i in n])
    q_pow = q ** -n.astype(float)
    c3 = np.diag(q_pow * (d + e_beta)).astype(complex) - np.diag(q_pow) @ (ad @ a)
    c3_scale = np.diag(q_pow * (np.abs(d) + np.abs(e_beta) + np.abs(np.diag(ad @ a))))
    rpt.add("C3~=0", scaled_residual(c3, c3_scale, m), tol)
    comm_scale = c3_scale @ abs_a + abs_a @ c3_scale
    rpt.add("[C3~,a]=0", scaled_residual(comm(c3, a), comm_scale, m), tol)
    rpt.add("[C3~,a_dag]=0", scaled_residual(comm(c3, ad), comm_scale.T, m), tol)

    c1 = np.diag(np.exp(2j * np.pi * n))
    c2 = np.diag(np.exp(-2j * np.pi * n / rep.lam)) @ rep.t_op
    for name, c in (("C1", c1), ("C2", c2)):
        rpt.add(f"{name}=I", block_residual(c, rep.identity, m), tol)
        rpt.add(f"[{name},a]=0", scaled_residual(comm(c, a), 2 * abs_a, m), tol)
        rpt.add(f"[{name},a_dag]=0", scaled_residual(comm(c, ad), 2 * abs_a.T, m), tol)

    r1, r2 = funct_residuals(defa, rep.dim)
    rpt.add("funct1", r1, tol)
    rpt.add("funct2", r2, tol)
    return rpt


def with_beta(defa: DeformedAlgebra, beta) -> DeformedAlgebra:
    """Copy with beta_def replaced (D0 kept), for fault injection."""
    return dataclasses.replace(defa, beta_def=np.asarray(beta, dtype=float))


def cv_lambda_closed_form(q: float, alpha_hat: float, n0: int, lambda0: float, n: int,
                          limit: bool = False) -> float:
    """lambda_n of a deformed CV unirrep with lowest weight n0."""
    B = 2 * alpha_hat * (-1) ** n0
    if q == 1:
        if not limit:
            raise InvalidParameters("q = 1 needs limit=True")
        return lambda0 + n + B * (1 - (-1) ** n) / 2
    if not q > 0:
        raise InvalidParameters("q must be positive")
    return q ** n * lambda0 + q ** -n0 * ((q ** n - q ** -n) / (q - 1 / q)
                                          + B * (q ** n - (-q) ** -n) / (q + 1 / q))


def cv_lambda_recursion(q: float, alpha_hat: float, n0: int, lambda0: float, n_max: int) -> np.ndarray:
    """lambda_0..lambda_n_max from lambda_(n+1) = q lambda_n + q^(-n0-n) (1 + 2 alpha_hat (-1)^(n0+n))."""
    out = [float(lambda0)]
    for n in range(n_max):
        out.append(q * out[-1] + q ** (-n0 - n) * (1 + 2 * alpha_hat * (-1) ** (n0 + n)))
    return np.array(out)
