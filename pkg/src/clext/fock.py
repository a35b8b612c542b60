"""Truncated Fock-space matrices for the GDOA realization.

Basis |0> .. |D-1>.  ``a_dag`` maps the top level out of the space, so every
identity is checked only on the interior block |0> .. |m-1> with
``m = D - lam`` (or smaller for products of many ladder operators).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraParams, structure_values
from .errors import InvalidParameters, TruncationTooSmall
from .report import RelationReport, block_residual, max_abs
from .reps import fock_exists


@dataclass(frozen=True, eq=False)
class FockRep:
    params: AlgebraParams
    dim: int
    structure: np.ndarray  # diagonal of a_dag a, level by level
    a_dag: np.ndarray
    a: np.ndarray
    n_op: np.ndarray
    t_op: np.ndarray
    projectors: tuple

    @property
    def lam(self) -> int:
        return self.params.lam

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def interior(self, depth: int = 1) -> int:
        """Size of the truncation-safe block for products with ``depth`` ladder factors."""
        return self.dim - max(self.lam, depth)

    def proj(self, mu: int) -> np.ndarray:
        return self.projectors[mu % self.lam]

    def diag_from_grades(self, coeffs) -> np.ndarray:
        """sum_mu coeffs[mu] P_mu as a matrix."""
        coeffs = np.asarray(coeffs)
        return np.diag(coeffs[np.arange(self.dim) % self.lam]).astype(complex)


def _require_dim(lam: int, dim: int) -> int:
    if not isinstance(dim, (int, np.integer)) or dim <= 0 or dim % lam:
        raise InvalidParameters(f"dim must be a positive multiple of lambda={lam}, got {dim!r}")
    return int(dim)


def fock_from_structure(params: AlgebraParams, dim: int, structure) -> FockRep:
    """Assemble a FockRep whose a_dag a has the given diagonal.

    ``structure[n]`` is the squared norm of a_dag on |n-1>; entry 0 must be 0.
    Used directly by the deformed algebras.
    """
    dim = _require_dim(params.lam, dim)
    structure = np.asarray(structure, dtype=float)
    if structure.shape != (dim + 1,):
        raise InvalidParameters(f"structure must have {dim + 1} entries")
    if np.any(structure[1:] <= 0):
        raise InvalidParameters("structure function must be positive above level 0")
    n = np.arange(dim)
    a_dag = np.diag(np.sqrt(structure[1:dim]), k=-1).astype(complex)
    a = a_dag.conj().T.copy()
    projectors = tuple(np.diag((n % params.lam == mu).astype(float)).astype(complex)
                       for mu in range(params.lam))
    return FockRep(
        params=params,
        dim=dim,
        structure=structure,
        a_dag=a_dag,
        a=a,
        n_op=np.diag(n.astype(float)).astype(complex),
        t_op=np.diag(np.exp(2j * np.pi * n / params.lam)),
        projectors=projectors,
    )


def build_fock(params: AlgebraParams, dim: int) -> FockRep:
    """Bosonic Fock representation, a_dag |n> = sqrt(F(n+1)) |n+1>."""
    if not fock_exists(params):
        raise InvalidParameters(f"no Fock representation for alpha={params.alpha.tolist()}")
    return fock_from_structure(params, dim, structure_values(params, np.arange(dim + 1)))


def _check_dim(rep: FockRep) -> None:
    if rep.dim < 3 * rep.lam:
        raise TruncationTooSmall(f"dim {rep.dim} < 3*lambda = {3 * rep.lam}")


def comm(x, y):
    return x @ y - y @ x


def verify_defining_relations(rep: FockRep, tol: float = 1e-10) -> RelationReport:
    _check_dim(rep)
    m = rep.interior()
    lam = rep.lam
    a, ad, n_op = rep.a, rep.a_dag, rep.n_op
    rpt = RelationReport(notes=[f"interior block {m} of {rep.dim}"])

    rpt.add("[N,a_dag]=a_dag", block_residual(comm(n_op, ad), ad, m), tol)
    rpt.add("[N,a]=-a", block_residual(comm(n_op, a), -a, m), tol)
    rpt.add("T^lambda=I", block_residual(np.linalg.matrix_power(rep.t_op, lam), rep.identity, m), tol)
    rpt.add("sum P=I", block_residual(sum(rep.projectors), rep.identity, m), tol)
    idem = max(block_residual(rep.proj(mu) @ rep.proj(nu), rep.proj(mu) * (mu == nu), m)
               for mu in range(lam) for nu in range(lam))
    rpt.add("P_mu P_nu=delta P_mu", idem, tol)
    rpt.add("[N,P_mu]=0", max(block_residual(comm(n_op, p), 0 * p, m) for p in rep.projectors), tol)
    shift = max(block_residual(ad @ rep.proj(mu), rep.proj(mu + 1) @ ad, m) for mu in range(lam))
    rpt.add("a_dag P_mu=P_(mu+1) a_dag", shift, tol)
    g = rep.identity + rep.diag_from_grades(rep.params.alpha)
    rpt.add("[a,a_dag]=I+sum alpha P", block_residual(comm(a, ad), g, m), tol)
    rpt.add("a_dag a=F(N)", block_residual(ad @ a, np.diag(rep.structure[:rep.dim]), m), tol)
    return rpt


def casimir_matrices(rep: FockRep, tol: float = 1e-10):
    """Return ``(C1, C2, C3, report)`` with the Fock-space identities checked."""
    _check_dim(rep)
    m = rep.interior()
    lam = rep.lam
    n = np.arange(rep.dim)
    c1 = np.diag(np.exp(2j * np.pi * n))
    c2 = np.diag(np.exp(-2j * np.pi * n / lam)) @ rep.t_op
    c3 = rep.n_op + rep.diag_from_grades(rep.params.beta) - rep.a_dag @ rep.a
    eye = rep.identity

    rpt = RelationReport(notes=[f"interior block {m} of {rep.dim}"])
    rpt.add("C1=I", block_residual(c1, eye, m), tol)
    rpt.add("C2=I", block_residual(c2, eye, m), tol)
    rpt.add("C3=0", block_residual(c3, 0 * eye, m), tol)
    rpt.add("C1 C2^lambda=I", block_residual(c1 @ np.linalg.matrix_power(c2, lam), eye, m), tol)
    rpt.add("[C3,a]=0", block_residual(comm(c3, rep.a), 0 * eye, m), tol)
    rpt.add("[C3,a_dag]=0", block_residual(comm(c3, rep.a_dag), 0 * eye, m), tol)
    for name, c in (("C1", c1), ("C2", c2)):
        rpt.add(f"[{name},a]=0", block_residual(comm(c, rep.a), 0 * eye, m), tol)
    return c1, c2, c3, rpt


def h0_anticommutator(rep: FockRep) -> np.ndarray:
    """H0 = (a a_dag + a_dag a) / 2; exact except for the top level."""
    return 0.5 * (rep.a @ rep.a_dag + rep.a_dag @ rep.a)


def h0_matrix(rep: FockRep) -> np.ndarray:
    """H0 = N + 1/2 + sum gamma_mu P_mu (real diagonal, valid at every level)."""
    return (rep.n_op + 0.5 * rep.identity + rep.diag_from_grades(rep.params.gamma)).real


@dataclass(frozen=True)
class Level:
    n: int
    k: int
    mu: int
    energy: float
    degeneracy_class: int
    degeneracy: int

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "mu": self.mu, "energy": self.energy,
                "degeneracy_class": self.degeneracy_class, "degeneracy": self.degeneracy}


def group_levels(energies, tol: float = 1e-9) -> list[tuple[int, int]]:
    """Class index and class size for each energy; equal within ``tol`` means same class.

    Classes are numbered by increasing energy.
    """
    energies = np.asarray(energies, dtype=float)
    order = np.argsort(energies, kind="stable")
    cls = np.empty(len(energies), dtype=int)
    current, anchor = -1, None
    for idx in order:
        if anchor is None or energies[idx] - anchor > tol:
            current += 1
            anchor = energies[idx]
        cls[idx] = current
    sizes = np.bincount(cls) if len(cls) else np.array([], dtype=int)
    return [(int(c), int(sizes[c])) for c in cls]


def levels_from_energies(energies, lam: int, tol: float = 1e-9) -> list[Level]:
    groups = group_levels(energies, tol)
    return [Level(n, n // lam, n % lam, float(e), c, s)
            for n, (e, (c, s)) in enumerate(zip(energies, groups))]


def h0_spectrum(params: AlgebraParams, k_max: int, tol: float = 1e-9) -> list[Level]:
    """E_(k lam + mu) = k lam + mu + gamma_mu + 1/2 for k = 0..k_max."""
    if not fock_exists(params):
        raise InvalidParameters(f"no Fock representation for alpha={params.alpha.tolist()}")
    if k_max < 0:
        raise InvalidParameters("k_max must be nonnegative")
    n = np.arange((k_max + 1) * params.lam)
    energies = n + params.gamma[n % params.lam] + 0.5
    return levels_from_energies(energies, params.lam, tol)


def spectrum_matches_matrix(energies, matrix, m: int, tol: float = 1e-10) -> float:
    """Max gap between sorted closed-form energies and eigenvalues of the leading block.

    ``matrix`` must be diagonal in the number basis so the leading ``m`` levels
    are an invariant subspace.
    """
    block = np.asarray(matrix)[:m, :m]
    eig = np.sort(np.linalg.eigvalsh(0.5 * (block + block.conj().T)))
    return max_abs(eig - np.sort(np.asarray(energies[:m], dtype=float)))


def levels_to_csv(levels, columns=("n", "k", "mu", "energy")) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for lv in levels:
        d = lv.to_dict() if hasattr(lv, "to_dict") else dict(lv)
        w.writerow([f"{d[c]:.12g}" if isinstance(d[c], float) else d[c] for c in columns])
    return buf.getvalue()


def perturbed(rep: FockRep, row: int, col: int, delta: float) -> FockRep:
    """Copy of ``rep`` with one a_dag entry shifted (and a kept adjoint)."""
    ad = rep.a_dag.copy()
    ad[row, col] += delta
    return FockRep(rep.params, rep.dim, rep.structure, ad, ad.conj().T.copy(), rep.n_op,
                   rep.t_op, rep.projectors)


__all__ = [
    "FockRep", "Level", "build_fock", "fock_from_structure", "verify_defining_relations",
    "casimir_matrices", "h0_matrix", "h0_anticommutator", "h0_spectrum", "group_levels",
    "levels_from_energies", "spectrum_matches_matrix", "levels_to_csv", "perturbed", "comm",
]
