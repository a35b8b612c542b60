"""Bosonized parasupersymmetric variants on a Fock representation.

PSSQM of order ``p`` lives on ``lam = p + 1``; pseudoSSQM and order-2
OSSQM live on ``lam = 3``.  Every Hamiltonian here is diagonal in the number
basis, built as ``H0 + 1/2 sum_nu r_nu P_nu`` from level-shift coefficients
``r``; each construction also has a closed form used as a cross-check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .algebra import TOL, AlgebraParams
from .errors import InvalidParameters, NotApplicable, TruncationTooSmall
from .fock import FockRep, comm, h0_matrix, levels_from_energies
from .report import RelationReport, block_residual, max_abs
from .reps import fock_exists

SQRT2 = np.sqrt(2.0)


def _require_lambda(rep: FockRep, lam: int, what: str) -> None:
    if rep.lam != lam:
        raise InvalidParameters(f"{what} needs lambda = {lam}, got {rep.lam}")


def _require_interior(rep: FockRep, depth: int) -> int:
    if rep.dim < 3 * rep.lam:
        raise TruncationTooSmall(f"dim {rep.dim} < 3*lambda = {3 * rep.lam}")
    return rep.interior(depth)


def _mpow(x, k):
    return np.linalg.matrix_power(x, k)


def dag(x):
    return x.conj().T


# ---------------------------------------------------------------------------
# PSSQM of order p = lam - 1


def _check_mu(mu: int, p: int) -> int:
    if not isinstance(mu, (int, np.integer)) or not 0 <= mu <= p:
        raise InvalidParameters(f"mu must lie in 0..{p}, got {mu!r}")
    return int(mu)


def default_eta(p: int) -> np.ndarray:
    return np.full(p, SQRT2, dtype=complex)


def check_eta(eta, p: int, tol: float = 1e-9) -> np.ndarray:
    """Validate eta_(mu+1) .. eta_(mu+p): all nonzero with sum |eta|^2 = 2p."""
    eta = np.asarray(eta, dtype=complex).ravel()
    if eta.shape != (p,):
        raise InvalidParameters(f"eta must have {p} components, got {eta.size}")
    if np.any(np.abs(eta) <= tol):
        raise InvalidParameters("eta components must be nonzero")
    norm = float(np.sum(np.abs(eta) ** 2))
    if abs(norm - 2 * p) > tol:
        raise InvalidParameters(f"sum |eta|^2 must equal 2p = {2 * p}, got {norm:.12g}")
    return eta


def pssqm_r_mu2(params: AlgebraParams, mu: int, eta=None) -> float:
    """r_(mu+2) fixed by the (p+1)-term relation for the given eta."""
    p = params.lam - 1
    mu = _check_mu(mu, p)
    if eta is None:
        a = params.a
        total = (p - 2) * a(mu + 2) + 2 * sum((p - nu + 1) * a(mu + nu) for nu in range(3, p + 1))
        return (total + p * (p - 2)) / p
    w = np.abs(check_eta(eta, p)) ** 2
    acc = 0.0
    for nu in range(2, p + 1):
        acc += w[nu - 1] * (nu - 1 + sum(params.a(mu + rho + 2) for rho in range(nu - 1)))
    return acc / p - 1.0 - params.a(mu + 2)


def pssqm_r_coeffs(params: AlgebraParams, mu: int, r_mu2_override: Optional[float] = None,
                   eta=None) -> np.ndarray:
    """Level shifts r_0 .. r_p (indexed by grade) solving the PSSQM recursion.

    ``r_(mu+2)`` is the free one; the rest follow from
    ``r_(mu+nu) = 2 + alpha_(mu+nu) + alpha_(mu+nu+1) + r_(mu+nu+1)``.
    """
    lam = params.lam
    p = lam - 1
    mu = _check_mu(mu, p)
    if not fock_exists(params):
        raise InvalidParameters(f"no Fock representation for alpha={params.alpha.tolist()}")
    a = params.a
    r = np.full(lam, np.nan)
    r2 = pssqm_r_mu2(params, mu, eta) if r_mu2_override is None else float(r_mu2_override)
    r[(mu + 2) % lam] = r2
    r[(mu + 1) % lam] = 2 + a(mu + 1) + a(mu + 2) + r2
    for nu in range(2, p + 1):
        r[(mu + nu + 1) % lam] = r[(mu + nu) % lam] - 2 - a(mu + nu) - a(mu + nu + 1)
    return r


def pssqm_r_explicit(params: AlgebraParams, mu: int, r_mu2: float) -> np.ndarray:
    """Same r vector from its gamma-form solution (independent of the recursion)."""
    lam = params.lam
    p = lam - 1
    g = params.g
    r = np.empty(lam)
    r[mu % lam] = -2 * (p - 1) - 2 * g(mu) + 2 * g(mu + 2) + r_mu2
    r[(mu + 1) % lam] = 2 - 2 * g(mu + 1) + 2 * g(mu + 2) + r_mu2
    for nu in range(2, p + 1):
        r[(mu + nu) % lam] = -2 * (nu - 2) + 2 * g(mu + 2) - 2 * g(mu + nu) + r_mu2
    return r


def pssqm_recursion_residual(params: AlgebraParams, mu: int, r) -> float:
    p = params.lam - 1
    a = params.a
    lam = params.lam
    return max(abs(r[(mu + nu) % lam] - (2 + a(mu + nu) + a(mu + nu + 1) + r[(mu + nu + 1) % lam]))
               for nu in range(1, p + 1))


@dataclass(frozen=True, eq=False)
class PssqmRealization:
    rep: FockRep
    p: int
    mu: int
    eta: np.ndarray
    r: np.ndarray
    Q: np.ndarray
    H: np.ndarray

    variant = "PSSQM"

    @property
    def params(self) -> AlgebraParams:
        return self.rep.params

    def bagchi_parts(self):
        """(Q_nu, sigma_nu) for nu = 1..p with Q = sum sigma_nu Q_nu."""
        p, mu, rep = self.p, self.mu, self.rep
        parts = []
        for nu in range(1, p + 1):
            grade_idx = p + 1 + mu - nu
            parts.append((rep.a_dag @ rep.proj(grade_idx), self.eta[p - nu]))
        return parts


def pssqm_h_closed_form(rep: FockRep, mu: int, r_mu2: float) -> np.ndarray:
    p = rep.lam - 1
    const = 0.5 * (2 * rep.params.g(mu + 2) + r_mu2 - 2 * p + 3)
    h = rep.n_op + const * rep.identity
    for nu in range(1, p + 1):
        h = h + (p + 1 - nu) * rep.proj(mu + nu)
    return h


def h_from_shifts(rep: FockRep, r) -> np.ndarray:
    """H0 + 1/2 sum r_nu P_nu."""
    return h0_matrix(rep).astype(complex) + 0.5 * rep.diag_from_grades(np.asarray(r, dtype=float))


def pssqm_build(rep: FockRep, mu: int, eta=None, r_mu2_override: Optional[float] = None) -> PssqmRealization:
    p = rep.lam - 1
    mu = _check_mu(mu, p)
    eta = default_eta(p) if eta is None else check_eta(eta, p)
    use_eta = None if np.allclose(np.abs(eta) ** 2, 2.0) else eta
    r = pssqm_r_coeffs(rep.params, mu, r_mu2_override, use_eta)
    q = sum(eta[nu - 1] * rep.a_dag @ rep.proj(mu + nu) for nu in range(1, p + 1))
    return PssqmRealization(rep, p, mu, eta, r, q, h_from_shifts(rep, r))


def pssqm_verify(real: PssqmRealization, tol: float = 1e-10) -> RelationReport:
    rep, p, mu = real.rep, real.p, real.mu
    m = _require_interior(rep, p + 2)
    Q, H = real.Q, real.H
    Qd = dag(Q)
    zero = 0 * H
    rpt = RelationReport(notes=[f"interior block {m} of {rep.dim}"])

    rpt.add("Q^(p+1)=0", block_residual(_mpow(Q, p + 1), zero, m), tol)
    rpt.add_nonzero("Q^p!=0", max_abs(_mpow(Q, p)[:m, :m]), tol)
    rpt.add("[H,Q]=0", block_residual(comm(H, Q), zero, m), tol)
    lhs = sum(_mpow(Q, p - k) @ Qd @ _mpow(Q, k) for k in range(p + 1))
    rpt.add("sum Q^(p-k) Qdag Q^k=2p Q^(p-1) H",
            block_residual(lhs, 2 * p * _mpow(Q, p - 1) @ H, m, relative=True), tol)
    rpt.add("H diagonal", max_abs(H - np.diag(np.diag(H))), tol)
    r_mu2 = real.r[(mu + 2) % rep.lam]
    rpt.add("H ansatz=closed form", block_residual(H, pssqm_h_closed_form(rep, mu, r_mu2), m), tol)
    rpt.add("r recursion", pssqm_recursion_residual(rep.params, mu, real.r), tol)

    parts = real.bagchi_parts()
    rpt.add("Q=sum sigma Q_nu", block_residual(Q, sum(s * qn for qn, s in parts), m), tol)
    worst = [0.0, 0.0, 0.0]
    for i, (qi, _) in enumerate(parts, start=1):
        for j, (qj, _) in enumerate(parts, start=1):
            prod = qi @ qj
            target = prod if j == i + 1 else zero
            worst[0] = max(worst[0], block_residual(prod, target, m))
            worst[1] = max(worst[1], block_residual(qi @ dag(qj), qi @ dag(qi) if i == j else zero, m))
            worst[2] = max(worst[2], block_residual(dag(qi) @ qj, dag(qi) @ qi if i == j else zero, m))
        if i < p:
            rpt.add_nonzero(f"Q_{i} Q_{i + 1}!=0", max_abs((qi @ parts[i][0])[:m, :m]), tol)
    rpt.add("Q_nu Q_nu'=delta(nu',nu+1) Q_nu Q_(nu+1)", worst[0], tol)
    rpt.add("Q_nu Q_nu'dag=delta Q_nu Q_nu dag", worst[1], tol)
    rpt.add("Q_nu dag Q_nu'=delta Q_nu dag Q_nu", worst[2], tol)
    return rpt


def pssqm_ground_energy(params: AlgebraParams, mu: int, r_mu2: Optional[float] = None) -> float:
    p = params.lam - 1
    if r_mu2 is None:
        r_mu2 = pssqm_r_mu2(params, mu)
    return 0.5 * (2 * params.g(mu + 2) + r_mu2 + 2 * mu - 2 * p + 3)


def pssqm_ground_energy_gamma_form(params: AlgebraParams, mu: int) -> float:
    """Ground energy for the default eta written through gamma only (parity-split)."""
    p = params.lam - 1
    mu = _check_mu(mu, p)
    g = params.g
    if mu % 2 == 0:
        s = sum(g(2 * nu + 1) for nu in range(0, (mu - 2) // 2 + 1)) if mu >= 2 else 0.0
        s += sum(g(2 * nu) for nu in range((mu + 2) // 2, p // 2 + 1))
    else:
        s = sum(g(2 * nu) for nu in range(0, (mu - 1) // 2 + 1))
        s += sum(g(2 * nu + 1) for nu in range((mu + 1) // 2, (p - 1) // 2 + 1))
    return (4 * s + p * (2 * mu - p + 1)) / (2 * p)


def pssqm_ground_bound(p: int, mu: int) -> float:
    """Lower bound on the ground energy (strict for p >= 2)."""
    return (p + 1) * (mu - p + 1) / p if mu <= p - 2 else 0.0


@dataclass
class Spectrum:
    levels: list
    ground_energy: float
    ground_degeneracy: int
    excited_degeneracies: list
    report: RelationReport = field(default_factory=RelationReport)

    def to_dict(self) -> dict:
        return {"levels": [lv.to_dict() for lv in self.levels], "ground_energy": self.ground_energy,
                "ground_degeneracy": self.ground_degeneracy,
                "excited_degeneracies": self.excited_degeneracies}


def _class_sizes(levels) -> list[int]:
    sizes: dict[int, int] = {}
    for lv in levels:
        sizes[lv.degeneracy_class] = lv.degeneracy
    return [sizes[c] for c in sorted(sizes)]


def spectrum_from_diagonal(diag, lam: int, tol: float = 1e-9, complete: Optional[int] = None) -> Spectrum:
    """Group a diagonal Hamiltonian's entries into degeneracy classes.

    Classes whose members may extend past the listed levels should be cut by
    passing ``complete`` (number of trustworthy classes).
    """
    levels = levels_from_energies(np.real(np.asarray(diag)), lam, tol)
    sizes = _class_sizes(levels)
    if complete is not None:
        sizes = sizes[:complete]
    ground = min(lv.energy for lv in levels)
    return Spectrum(levels, ground, sizes[0], sizes[1:])


def pssqm_spectrum(params: AlgebraParams, mu: int, k_max: int, tol: float = 1e-9) -> Spectrum:
    """Closed-form PSSQM spectrum through class ``k_max + 1`` plus structural checks."""
    if not fock_exists(params):
        raise InvalidParameters(f"no Fock representation for alpha={params.alpha.tolist()}")
    p = params.lam - 1
    mu = _check_mu(mu, p)
    if k_max < 0:
        raise InvalidParameters("k_max must be nonnegative")
    e0 = pssqm_ground_energy(params, mu)
    n = np.arange((k_max + 1) * (p + 1) + mu + 1)
    k, nu = np.divmod(n, p + 1)
    energies = np.where(nu <= mu, k * (p + 1), (k + 1) * (p + 1)) + e0
    spec = spectrum_from_diagonal(energies, params.lam, tol)
    rpt = spec.report
    rpt.add("ground degeneracy=mu+1", abs(spec.ground_degeneracy - (mu + 1)), 0)
    rpt.add("excited degeneracy=p+1", max((abs(s - (p + 1)) for s in spec.excited_degeneracies), default=0), 0)
    bound = pssqm_ground_bound(p, mu)
    if p >= 2:
        rpt.add_nonzero("E0 above bound", e0 - bound, 0.0)
    else:
        # order 1 is ordinary SSQM: E0 >= 0, with equality when unbroken
        rpt.add("E0 >= 0", max(0.0, -e0), 0.0)
    return spec


# ---------------------------------------------------------------------------
# Special case with a square-root Hamiltonian


def special_case_applies(params: AlgebraParams, mu: int, tol: float = TOL) -> bool:
    p = params.lam - 1
    if mu not in (0, p) or params.alpha[0] <= -1 + tol:
        return False
    return all(abs(params.a(mu + nu) + 1) <= tol for nu in range(2, p + 1))


def special_r(params: AlgebraParams, mu: int) -> np.ndarray:
    r = np.zeros(params.lam)
    r[mu % params.lam] = -1 - params.a(mu)
    r[(mu + 1) % params.lam] = 1 + params.a(mu + 1)
    return r


def special_h_closed_form(rep: FockRep, mu: int) -> np.ndarray:
    p = rep.lam - 1
    h = rep.n_op.copy()
    if mu == 0:
        for nu in range(1, p + 1):
            h = h + (p + 1 - nu) * rep.proj(nu)
    else:
        a0 = rep.params.alpha[0]
        for nu in range(0, p + 1):
            h = h + (a0 + 1 - nu) * rep.proj(nu)
    return h


def sqrt_psd(x: np.ndarray) -> np.ndarray:
    """Principal square root of a Hermitian positive semidefinite matrix."""
    x = 0.5 * (x + dag(x))
    w, v = np.linalg.eigh(x)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ dag(v)


@dataclass(frozen=True, eq=False)
class SpecialCase:
    realization: PssqmRealization
    h_closed: np.ndarray
    h_sqrt: np.ndarray
    h_supercharge: np.ndarray
    spectrum: Spectrum
    report: RelationReport


def pssqm_special_case(rep: FockRep, mu: int, tol: float = 1e-8) -> SpecialCase:
    params = rep.params
    p = rep.lam - 1
    if not special_case_applies(params, mu):
        raise NotApplicable(f"square-root form needs mu in (0, {p}) and alpha_(mu+nu) = -1 for nu = 2..p")
    real = pssqm_build(rep, mu)
    m = _require_interior(rep, 4)
    Q, Qd = real.Q, dag(real.Q)
    comm_part = Qd @ Q - Q @ Qd
    h_sqrt = 0.5 * sqrt_psd(comm_part @ comm_part + Qd @ Q @ Q @ Qd)
    parts = [qn for qn, _ in real.bagchi_parts()]
    h_super = parts[0] @ dag(parts[0]) + sum(dag(qn) @ qn for qn in parts)
    h_closed = special_h_closed_form(rep, mu)

    rpt = RelationReport(notes=[f"interior block {m} of {rep.dim}"])
    rpt.add("r=special r", max_abs(real.r - special_r(params, mu)), tol)
    rpt.add("H=closed form", block_residual(real.H, h_closed, m), tol)
    rpt.add("H=sqrt form", block_residual(real.H, h_sqrt, m), tol)
    rpt.add("H=supercharge sum", block_residual(real.H, h_super, m), tol)

    complete = (m - mu - 1) // (p + 1)
    spec = spectrum_from_diagonal(np.diag(real.H)[:m], rep.lam, complete=complete)
    if mu == 0:
        rpt.add("E0=0", abs(spec.ground_energy), tol)
        rpt.add("ground nondegenerate", abs(spec.ground_degeneracy - 1), 0)
    else:
        rpt.add("E0=alpha0+1", abs(spec.ground_energy - (params.alpha[0] + 1)), tol)
        rpt.add("ground degeneracy=p+1", abs(spec.ground_degeneracy - (p + 1)), 0)
    return SpecialCase(real, h_closed, h_sqrt, h_super, spec, rpt)


# ---------------------------------------------------------------------------
# p conserved charges Q_r and bosonic constants I_t


def b_coeff(t: int, nu: int) -> int:
    """b_t^nu = 1 - 2 delta(t, nu) (1 - delta(t, 1)); t, nu in 1..p+1."""
    return 1 - 2 * int(t == nu) * (1 - int(t == 1))


def b_inverse(nu: int, r: int, p: int) -> float:
    """Closed-form inverse table: sqrt2 a_dag P_(mu+nu) = sum_r b_nu^r Q_r."""
    d = lambda i, j: int(i == j)  # noqa: E731
    return 0.5 * (d(nu, 1) * (1 + (2 - p) * d(r, 1)) + (1 - d(nu, 1)) * (d(r, 1) - d(nu, r)))


def c_coeff(t: int, r: int, nu: int) -> int:
    return (b_coeff(t, nu + 1) - b_coeff(t, nu)) * b_coeff(r, nu)


def d_coeff(t: int, r: int, s: int, p: int) -> float:
    return sum(c_coeff(t, r, nu) * b_inverse(nu, s, p) for nu in range(1, p + 1))


def B_value(seq: Sequence[int], nu: int) -> int:
    """B_nu(r_k .. r_(k+n)) = prod_l b_(r_(k+l))^(nu+n-l); empty product is 1."""
    n = len(seq) - 1
    out = 1
    for l, r in enumerate(seq):
        out *= b_coeff(r, nu + n - l)
    return out


@dataclass(frozen=True, eq=False)
class ChargeSet:
    rep: FockRep
    p: int
    mu: int
    Q: tuple  # Q[r-1]
    I: tuple  # I[t-1]
    H: np.ndarray
    b: np.ndarray  # b[t-1, nu-1], t, nu = 1..p+1
    b_inv: np.ndarray  # b_inv[nu-1, r-1]
    c: np.ndarray  # c[t-1, r-1, nu-1]
    d: np.ndarray  # d[t-1, r-1, s-1]

    def q(self, r: int) -> np.ndarray:
        return self.Q[r - 1]

    def i(self, t: int) -> np.ndarray:
        return self.I[t - 1]

    def d_value(self, t: int, r: int, s: int) -> float:
        return float(self.d[t - 1, r - 1, s - 1])


def build_charge_set(rep: FockRep, mu: int) -> ChargeSet:
    p = rep.lam - 1
    mu = _check_mu(mu, p)
    if rep.dim < 3 * rep.lam:
        raise TruncationTooSmall(f"dim {rep.dim} < 3*lambda = {3 * rep.lam}")
    b = np.array([[b_coeff(t, nu) for nu in range(1, p + 2)] for t in range(1, p + 2)])
    b_inv = np.array([[b_inverse(nu, r, p) for r in range(1, p + 1)] for nu in range(1, p + 1)])
    c = np.array([[[c_coeff(t, r, nu) for nu in range(1, p + 1)] for r in range(1, p + 1)]
                  for t in range(1, p + 2)])
    d = np.einsum("trn,ns->trs", c, b_inv)
    qs = tuple(SQRT2 * sum(b[r - 1, nu - 1] * rep.a_dag @ rep.proj(mu + nu) for nu in range(1, p + 1))
               for r in range(1, p + 1))
    its = tuple(sum(b[t - 1, nu - 1] * rep.proj(mu + nu) for nu in range(1, p + 2)) for t in range(1, p + 2))
    h = pssqm_build(rep, mu).H
    return ChargeSet(rep, p, mu, qs, its, h, b, b_inv, c, d)


def verify_charge_set(cs: ChargeSet, tol: float = 1e-10, rng: Optional[np.random.Generator] = None,
                      product_samples: int = 200) -> RelationReport:
    """Each Q_r is a PSSQM charge; I_t are conserved; products and [I_t, Q_r] match their formulas.

    For p <= 2 all index tuples of the product formula are checked, otherwise
    ``product_samples`` random tuples per length.
    """
    rep, p, mu = cs.rep, cs.p, cs.mu
    m = _require_interior(rep, p + 2)
    zero = 0 * cs.H
    rpt = RelationReport(notes=[f"interior block {m} of {rep.dim}"])

    for r in range(1, p + 1):
        real = PssqmRealization(rep, p, mu, SQRT2 * cs.b[r - 1, :p].astype(complex),
                                pssqm_r_coeffs(rep.params, mu), cs.q(r), cs.H)
        rpt.extend(pssqm_verify(real, tol), prefix=f"Q_{r}: ")
    rpt.add("I_1=I", block_residual(cs.i(1), rep.identity, m), tol)
    rpt.add("[I_t,H]=0", max(block_residual(comm(it, cs.H), zero, m) for it in cs.I), tol)
    rpt.add("[I_t,I_u]=0", max(block_residual(comm(x, y), zero, m) for x in cs.I for y in cs.I), tol)
    rpt.add("b_t^nu in {-1,1}", float(np.max(np.abs(np.abs(cs.b) - 1))), 0)

    b_sq = cs.b[:p, :p].astype(float)
    rpt.add("b inverse table", max_abs(b_sq @ cs.b_inv - np.eye(p)), tol)
    comm_res = 0.0
    for t in range(1, p + 2):
        for r in range(1, p + 1):
            rhs = sum(cs.d_value(t, r, s) * cs.q(s) for s in range(1, p + 1))
            comm_res = max(comm_res, block_residual(comm(cs.i(t), cs.q(r)), rhs, m))
    rpt.add("[I_t,Q_r]=sum d Q_s", comm_res, tol)

    rng = rng if rng is not None else np.random.default_rng(0)
    prod_res = 0.0
    for n in range(0, p + 1):
        if p <= 2:
            tuples = itertools.product(range(1, p + 1), repeat=n + 1)
        else:
            tuples = (tuple(rng.integers(1, p + 1, size=n + 1)) for _ in range(product_samples))
        adag_pow = _mpow(rep.a_dag, n + 1)
        for tup in tuples:
            lhs = rep.identity
            for r in tup:
                lhs = lhs @ cs.q(r)
            rhs = 2 ** ((n + 1) / 2) * adag_pow @ sum(
                (B_value(tup, nu) * rep.proj(mu + nu) for nu in range(1, p - n + 1)), zero)
            prod_res = max(prod_res, block_residual(lhs, rhs, m, relative=True))
    rpt.add("product formula (incl. Q^(p+1)=0)", prod_res, tol)
    return rpt


# Mixed multilinear relations
#   sum_k I_(t_k) Q_(r_k)..Q_(r_p) Q_s^dag Q_(r_1)..Q_(r_(k-1)) = 2p Q_r^(p-1) H


@dataclass(frozen=True)
class MixedRelation:
    rs: tuple  # r_1..r_p
    s: int
    ts: tuple  # t_1..t_(p+1)
    r: int
    residual: float = 0.0

    def describe(self) -> str:
        terms = []
        p = len(self.rs)
        for k in range(1, p + 2):
            word = [f"Q{x}" for x in self.rs[k - 1:]] + [f"Q{self.s}+"] + [f"Q{x}" for x in self.rs[:k - 1]]
            t = self.ts[k - 1]
            terms.append(("" if t == 1 else f"I{t} ") + " ".join(word))
        rhs = f"{2 * p} " + (f"Q{self.r}^{p - 1} " if p > 1 else "") + "H"
        return " + ".join(terms) + " = " + rhs

    def to_dict(self) -> dict:
        return {"r_seq": list(self.rs), "s": self.s, "t_seq": list(self.ts), "r": self.r,
                "relation": self.describe(), "residual": self.residual}


def _word(cs: ChargeSet, rs, s, k):
    out = cs.rep.identity
    for x in rs[k - 1:]:
        out = out @ cs.q(x)
    out = out @ dag(cs.q(s))
    for x in rs[:k - 1]:
        out = out @ cs.q(x)
    return out


def mixed_relation_residual(cs: ChargeSet, rel: MixedRelation, m: Optional[int] = None) -> float:
    p = cs.p
    m = cs.rep.interior(p + 2) if m is None else m
    lhs = sum(cs.i(t) @ _word(cs, rel.rs, rel.s, k) for k, t in enumerate(rel.ts, start=1))
    rhs = 2 * p * _mpow(cs.q(rel.r), p - 1) @ cs.H
    return block_residual(lhs, rhs, m, relative=True)


def selection_condition(rs, s: int, ts, r: int, p: int) -> bool:
    """D_k^nu = B_k([r]^(p-1)) for k = 1, 2 and nu = 1..p."""
    rr = [r] * (p - 1)
    for k in (1, 2):
        target = B_value(rr, k)
        for nu in range(1, p + 1):
            t = ts[nu + 2 - k - 1]
            tail = rs[nu + 2 - k - 1:]
            head = rs[:nu + 1 - k]
            dkv = b_coeff(t, p + k - 1) * B_value(tail, nu) * b_coeff(s, nu) * B_value(head, k)
            if dkv != target:
                return False
    return True


def _is_trivial(rel: MixedRelation) -> bool:
    """The plain (p+1)-term relation of a single charge, with no I_t insertions."""
    return len(set(rel.rs) | {rel.s, rel.r}) == 1 and set(rel.ts) == {1}


@dataclass
class MixedRelations:
    relations: list  # independent, deduplicated
    brute_force: list  # every index tuple satisfied numerically
    selected: list  # every index tuple passing the selection condition
    report: RelationReport

    def to_dict(self) -> dict:
        return {"count": len(self.relations), "relations": [r.to_dict() for r in self.relations],
                "brute_force_count": len(self.brute_force), "selected_count": len(self.selected),
                "report": self.report.to_dict()}


def find_mixed_relations(cs: ChargeSet, tol: float = 1e-9, include_trivial: Optional[bool] = None) -> MixedRelations:
    """Enumerate all mixed multilinear relations and reduce them to an independent set.

    Every index tuple is tested numerically and against the selection
    condition.  Satisfied tuples over the same words ``(r_1..r_p, s)`` are
    then identified when one is the other multiplied from the left by some
    ``I_u`` (u = 1 covers the identities where ``I_t`` acts trivially on a
    word); the first-letter identities ``I_(r+1) Q_r = Q_1`` merge nothing
    further.  Classes containing the plain single-charge relation are dropped
    unless ``include_trivial`` (default: only for p = 1, where nothing else exists).
    """
    p = cs.p
    if include_trivial is None:
        include_trivial = p == 1
    m = _require_interior(cs.rep, p + 2)
    ts_all = list(itertools.product(range(1, p + 2), repeat=p + 1))
    i_diag = np.array([np.real(np.diag(it))[:m] for it in cs.I])  # (p+1, m)

    brute, selected, relations = [], [], []
    for rs, s in itertools.product(itertools.product(range(1, p + 1), repeat=p), range(1, p + 1)):
        words = np.array([_word(cs, rs, s, k)[:m, :m] for k in range(1, p + 2)])  # (p+1, m, m)
        scaled = i_diag[:, None, :, None] * words[None, :, :, :]  # (t, k, m, m)
        group = []  # (relation, terms, rhs)
        for r in range(1, p + 1):
            rhs = (2 * p * _mpow(cs.q(r), p - 1) @ cs.H)[:m, :m]
            for ts in ts_all:
                terms = [scaled[t - 1, k] for k, t in enumerate(ts)]
                rel = MixedRelation(rs, s, ts, r, max_abs(sum(terms) - rhs) / max(1.0, max_abs(rhs)))
                if selection_condition(rs, s, ts, r, p):
                    selected.append(rel)
                if rel.residual <= tol:
                    brute.append(rel)
                    group.append((rel, terms, rhs))
        relations.extend(_independent(group, i_diag))

    if not include_trivial:
        relations = [cls for cls in relations if not any(_is_trivial(x) for x in cls)]
    reps_ = sorted((min(cls, key=_rank) for cls in relations), key=_rank)
    brute_set = {(x.rs, x.s, x.ts, x.r) for x in brute}
    sel_set = {(x.rs, x.s, x.ts, x.r) for x in selected}
    rpt = RelationReport(notes=[f"interior block {m} of {cs.rep.dim}", f"{len(reps_)} independent relations"])
    rpt.add("independent relations hold", max((x.residual for x in reps_), default=0.0), tol)
    rpt.add("selection condition = brute force", len(brute_set ^ sel_set), 0)
    return MixedRelations(reps_, brute, selected, rpt)


def _relation_key(terms, rhs) -> tuple:
    return tuple(_key(t) for t in terms) + (_key(rhs),)


def _independent(group, i_diag) -> list[list[MixedRelation]]:
    """Classes of relations (same words) related by left multiplication with some I_u."""
    index = {_relation_key(terms, rhs): i for i, (_, terms, rhs) in enumerate(group)}
    parent = list(range(len(group)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, (_, terms, rhs) in enumerate(group):
        for row in i_diag:
            j = index.get(_relation_key([row[:, None] * t for t in terms], row[:, None] * rhs))
            if j is not None:
                parent[find(i)] = find(j)
    classes: dict[int, list] = {}
    for i, (rel, _, _) in enumerate(group):
        classes.setdefault(find(i), []).append(rel)
    return list(classes.values())


def _key(x: np.ndarray) -> bytes:
    # + 0.0 folds -0.0 into 0.0 so equal matrices hash equally
    return (np.round(x, 9) + 0.0).tobytes()


def _rank(rel: MixedRelation):
    # prefer representatives with fewest I_t insertions and smallest labels
    return (sum(t != 1 for t in rel.ts), rel.r, rel.rs, rel.s, rel.ts)


# ---------------------------------------------------------------------------
# pseudoSSQM, lam = 3


@dataclass(frozen=True, eq=False)
class PseudoRealization:
    rep: FockRep
    family: str
    mu: int
    c_const: float
    params_used: dict
    r: np.ndarray
    Q: np.ndarray
    H: np.ndarray

    variant = "PseudoSSQM"


def _pseudo_common(rep: FockRep, mu: int, c_const: float) -> int:
    _require_lambda(rep, 3, "pseudoSSQM")
    if not isinstance(mu, (int, np.integer)) or not 0 <= mu <= 2:
        raise InvalidParameters(f"mu must lie in 0..2, got {mu!r}")
    if not np.isfinite(c_const) or c_const == 0:
        raise InvalidParameters("c_const must be a nonzero real")
    return int(mu)


def pseudo_h_closed_form(rep: FockRep, family: str, mu: int, r) -> np.ndarray:
    g, a = rep.params.g, rep.params.a
    if family == "one":
        h = rep.n_op + 0.5 * (2 * g(mu + 2) + r[(mu + 2) % 3] - 1) * rep.identity
        return h + 2 * rep.proj(mu + 1) + rep.proj(mu + 2)
    h = rep.n_op + 0.5 * (2 * g(mu + 2) - a(mu + 2)) * rep.identity
    h = h + 0.5 * (1 - a(mu + 1) + a(mu + 2) + r[mu % 3]) * rep.proj(mu)
    return h + rep.proj(mu + 1)


def pseudo_build(rep: FockRep, family: str, mu: int, c_const: float, eta: Optional[float] = None,
                 phi: float = 0.0, r_mu: Optional[float] = None) -> PseudoRealization:
    """Family "one": Q = (eta a_dag + e^(i phi) sqrt(4c^2 - eta^2) a) P_(mu+2), 0 < eta < 2|c|.
    Family "two": Q = 2|c| a P_(mu+2) with free r_mu."""
    mu = _pseudo_common(rep, mu, c_const)
    family = str(family).lower()
    a = rep.params.a
    c2 = c_const ** 2
    r = np.empty(3)
    if family in ("one", "1"):
        family = "one"
        eta = np.sqrt(2.0) * abs(c_const) if eta is None else float(eta)
        if not 0 < eta < 2 * abs(c_const):
            raise InvalidParameters(f"eta must lie in (0, 2|c|) = (0, {2 * abs(c_const):.6g}), got {eta}")
        r2 = (1 + a(mu + 2)) * (eta ** 2 - 2 * c2) / (2 * c2)
        r[(mu + 2) % 3] = r2
        r[(mu + 1) % 3] = 2 - a(mu) + r2
        r[mu] = -2 + a(mu + 1) + r2
        q = (eta * rep.a_dag + np.exp(1j * phi) * np.sqrt(4 * c2 - eta ** 2) * rep.a) @ rep.proj(mu + 2)
        used = {"eta": eta, "phi": float(phi)}
    elif family in ("two", "2"):
        family = "two"
        if r_mu is None or not np.isfinite(r_mu):
            raise InvalidParameters("family two needs a finite r_mu")
        r2 = -1 - a(mu + 2)
        r[(mu + 2) % 3] = r2
        r[(mu + 1) % 3] = 2 - a(mu) + r2
        r[mu] = float(r_mu)
        q = 2 * abs(c_const) * rep.a @ rep.proj(mu + 2)
        used = {"r_mu": float(r_mu)}
    else:
        raise InvalidParameters(f"family must be 'one' or 'two', got {family!r}")
    return PseudoRealization(rep, family, mu, float(c_const), used, r, q, h_from_shifts(rep, r))


def pseudo_mirror(real: PseudoRealization) -> PseudoRealization:
    """Partner solution with Q and Q^dag exchanged."""
    return PseudoRealization(real.rep, real.family, real.mu, real.c_const,
                             dict(real.params_used, mirrored=True), real.r, dag(real.Q), real.H)


def pseudo_equal_spacing_r_mu(params: AlgebraParams, mu: int, j: int = 0) -> float:
    """r_mu making the family-two spectrum equally spaced (one of the 6Z-shifted values)."""
    return params.a(mu + 1) - params.a(mu + 2) + 3 + 6 * j


def pseudo_verify(real: PseudoRealization, tol: float = 1e-10) -> RelationReport:
    rep = real.rep
    m = _require_interior(rep, 4)
    Q, H = real.Q, real.H
    zero = 0 * H
    rpt = RelationReport(notes=[f"interior block {m} of {rep.dim}"])
    rpt.add("Q^2=0", block_residual(Q @ Q, zero, m), tol)
    rpt.add("[H,Q]=0", block_residual(comm(H, Q), zero, m), tol)
    rpt.add("Q Qdag Q=4c^2 Q H", block_residual(Q @ dag(Q) @ Q, 4 * real.c_const ** 2 * Q @ H, m), tol)
    rpt.add_nonzero("Q!=0", max_abs(Q[:m, :m]), tol)
    rpt.add("H ansatz=closed form", block_residual(H, pseudo_h_closed_form(rep, real.family, real.mu, real.r), m),
            tol)
    return rpt


# ---------------------------------------------------------------------------
# OSSQM of order 2, lam = 3


@dataclass(frozen=True, eq=False)
class OrthoRealization:
    rep: FockRep
    mu: int
    xi: float
    phi: float
    r: np.ndarray
    Q1: np.ndarray
    Q2: np.ndarray
    H: np.ndarray

    variant = "OSSQM2"

    @property
    def charges(self):
        return (self.Q1, self.Q2)


def ossqm_h_closed_form(rep: FockRep, mu: int) -> np.ndarray:
    h = rep.n_op + 0.5 * (2 * rep.params.g(mu + 1) - 1) * rep.identity
    return h + 2 * rep.proj(mu) + rep.proj(mu + 1)


def ossqm_build(rep: FockRep, mu: int, xi: float = 1.0, phi: float = 0.0) -> OrthoRealization:
    _require_lambda(rep, 3, "OSSQM")
    if mu not in (0, 1):
        raise InvalidParameters(f"mu must be 0 or 1, got {mu!r}")
    if not 0 < xi <= SQRT2 + 1e-15:
        raise InvalidParameters(f"xi must lie in (0, sqrt 2], got {xi}")
    xi = min(float(xi), SQRT2)
    params = rep.params
    if abs(params.a(mu + 1) + 1) > TOL:
        raise NotApplicable(f"OSSQM needs alpha_(mu+1) = -1, got {params.a(mu + 1)}")
    rho = np.sqrt(max(2 - xi ** 2, 0.0))
    pm, pm2 = rep.proj(mu), rep.proj(mu + 2)
    q1 = xi * rep.a @ pm2 + np.exp(1j * phi) * rho * rep.a_dag @ pm
    q2 = -np.exp(-1j * phi) * rho * rep.a @ pm2 + xi * rep.a_dag @ pm
    r = np.empty(3)
    r[mu] = 1 + params.a(mu)
    r[(mu + 1) % 3] = 0.0
    r[(mu + 2) % 3] = -2 + params.a(mu)
    return OrthoRealization(rep, mu, xi, float(phi), r, q1, q2, h_from_shifts(rep, r))


def ossqm_verify(real: OrthoRealization, tol: float = 1e-10) -> RelationReport:
    rep = real.rep
    m = _require_interior(rep, 3)
    qs, H = real.charges, real.H
    zero = 0 * H
    rpt = RelationReport(notes=[f"interior block {m} of {rep.dim}"])
    total = sum(dag(q) @ q for q in qs)
    for r, qr in enumerate(qs, start=1):
        rpt.add(f"[H,Q{r}]=0", block_residual(comm(H, qr), zero, m), tol)
        for s, qs_ in enumerate(qs, start=1):
            rpt.add(f"Q{r} Q{s}=0", block_residual(qr @ qs_, zero, m), tol)
            lhs = qr @ dag(qs_) + (total if r == s else zero)
            rpt.add(f"Q{r} Q{s}dag+delta sum=2 delta H", block_residual(lhs, 2 * H if r == s else zero, m), tol)
    rpt.add("H ansatz=closed form", block_residual(H, ossqm_h_closed_form(rep, real.mu), m), tol)
    return rpt


def ossqm_ground_energy(params: AlgebraParams, mu: int) -> float:
    return params.alpha[0] + 1 if mu == 0 else -(params.alpha[2] + 1) / 2


def realization_spectrum(real, tol: float = 1e-9) -> Spectrum:
    """Spectrum read off the (diagonal) H on the interior block, complete classes only."""
    rep = real.rep
    m = rep.interior(rep.lam + 2)
    diag = np.real(np.diag(real.H))[:m]
    spec = spectrum_from_diagonal(diag, rep.lam, tol)
    # the last few classes may be missing members that sit above the block
    top = diag.max()
    keep = [lv for lv in spec.levels if lv.energy <= top - rep.lam - tol]
    sizes = _class_sizes(keep) if keep else []
    return Spectrum(keep, spec.ground_energy, sizes[0] if sizes else 0, sizes[1:])
