"""Acceptance criteria 1-10, each at its stated tolerance.

Every test records one PASS/FAIL line; the lines are printed in the pytest
terminal summary, or directly when this file is run as a script.
"""

import json
import time

import jsonschema
import numpy as np
import pytest

from clext import deform, susy
from clext.algebra import new_algebra
from clext.cli import REPORT_SCHEMA, run
from clext.deform import ScalarSequence
from clext.errors import RejectedFamily
from clext.fock import (build_fock, casimir_matrices, h0_matrix, h0_spectrum, spectrum_matches_matrix,
                        verify_defining_relations)
from clext.reps import classify_gdoa, classify_oracle, same_classification, sample_row_alpha, table_rows

from conftest import random_admissible

RESULTS = {}


def record(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def test_criterion_01_tables():
    rng = np.random.default_rng(101)
    total = bad = oracle_bad = 0
    for lam in (2, 3, 4):
        for row in table_rows(lam):
            for _ in range(200):
                free = sample_row_alpha(row, rng)
                params = new_algebra(lam, free)
                n0 = lam * int(rng.integers(0, 5)) + row.residue
                got = classify_gdoa(params, n0)
                total += 1
                if got.label != row.label or abs(got.c - row.casimir(free, n0)) > 1e-9:
                    bad += 1
                if not same_classification(got, classify_oracle(params, n0, 4 * lam)):
                    oracle_bad += 1
    record(1, bad == 0 and oracle_bad == 0,
           f"{total} samples, {bad} table mismatches, {oracle_bad} oracle disagreements")


def test_criterion_02_defining_relations():
    rng = np.random.default_rng(202)
    worst, failed = 0.0, []
    for i in range(50):
        lam = int(rng.integers(2, 7))
        params = random_admissible(rng, lam)
        rep = build_fock(params, 20 * lam)
        rpt = verify_defining_relations(rep, 1e-10)
        rpt.extend(casimir_matrices(rep, 1e-10)[3])
        worst = max([worst] + [c.residual for c in rpt.checks])
        failed += [f"{i}:{c.name}" for c in rpt.failures()]
    record(2, not failed, f"50 algebras, worst residual {worst:.2e}" + (f", failed {failed[:3]}" if failed else ""))


def test_criterion_03_h0_spectrum():
    rng = np.random.default_rng(303)
    worst = alt = 0.0
    for _ in range(30):
        lam = int(rng.integers(2, 7))
        params = random_admissible(rng, lam)
        rep = build_fock(params, 20 * lam)
        m = rep.dim - lam
        energies = [lv.energy for lv in h0_spectrum(params, 20)]
        worst = max(worst, spectrum_matches_matrix(energies, h0_matrix(rep), m))
        alt = max(alt, abs(np.sum((-1.0) ** np.arange(lam) * params.gamma)))
    first = [lv.energy for lv in h0_spectrum(new_algebra(3, [1, 0]), 1)]
    example_ok = np.allclose(first, [1, 2.5, 3, 4, 5.5, 6], atol=1e-12)
    record(3, worst <= 1e-10 and example_ok and alt <= 1e-10,
           f"eigenvalue gap {worst:.2e}, example {first}, max |alternating sum| {alt:.1e}")


def test_criterion_04_pssqm():
    rng = np.random.default_rng(404)
    problems, worst, witness = [], 0.0, None
    for p in range(1, 6):
        lam = p + 1
        for mu in range(p + 1):
            for _ in range(20):
                params = random_admissible(rng, lam)
                real = susy.pssqm_build(build_fock(params, 8 * lam), mu)
                rpt = susy.pssqm_verify(real, 1e-10)
                worst = max([worst] + [c.residual for c in rpt.checks if "!=" not in c.name])
                problems += [f"p={p} mu={mu}: {c.name}" for c in rpt.failures()]
                spec = susy.pssqm_spectrum(params, mu, 2)
                if spec.ground_degeneracy != mu + 1 or set(spec.excited_degeneracies) != {p + 1}:
                    problems.append(f"p={p} mu={mu}: degeneracy")
                e0 = spec.ground_energy
                bound = (p + 1) * (mu - p + 1) / p if mu <= p - 2 else 0.0
                if not e0 > bound:
                    problems.append(f"p={p} mu={mu}: E0={e0:.3g} not > {bound:.3g}")
                if mu <= p - 2 and e0 < 0 and witness is None:
                    witness = (p, mu, e0)
    if witness is None:
        problems.append("no E0 < 0 witness")
    uniq = sorted(set(problems))
    record(4, not problems,
           f"worst residual {worst:.2e}, witness {witness}, {len(problems)} failures: {uniq[:4]}")


def _special_alpha(p, mu, a0):
    lam = p + 1
    alpha = np.full(lam, np.nan)
    for nu in range(2, p + 1):
        alpha[(mu + nu) % lam] = -1.0
    alpha[0] = a0
    free = np.flatnonzero(np.isnan(alpha))
    alpha[free] = -np.nansum(alpha) / len(free)
    return alpha


def test_criterion_05_special_case():
    rng = np.random.default_rng(505)
    problems, worst = [], 0.0
    for p in range(2, 6):
        for mu in (0, p):
            for _ in range(3):
                alpha = _special_alpha(p, mu, float(rng.uniform(-0.5, 2.0)))
                params = new_algebra(p + 1, alpha[:-1])
                rep = build_fock(params, 10 * (p + 1))
                sc = susy.pssqm_special_case(rep, mu, 1e-8)
                m = rep.interior(4)
                gaps = [np.max(np.abs(x - y)[:m, :m]) for x, y in
                        ((sc.h_closed, sc.h_sqrt), (sc.h_closed, sc.h_supercharge), (sc.h_sqrt, sc.h_supercharge))]
                worst = max(worst, *gaps)
                e0, deg = sc.spectrum.ground_energy, sc.spectrum.ground_degeneracy
                if mu == 0 and abs(e0) > 1e-8:
                    problems.append(f"p={p} mu=0 E0={e0}")
                if mu == p and (abs(e0 - (alpha[0] + 1)) > 1e-8 or deg != p + 1):
                    problems.append(f"p={p} mu=p E0={e0} deg={deg}")
    record(5, worst <= 1e-8 and not problems, f"max H gap {worst:.2e}, {len(problems)} ground-state issues")


def test_criterion_06_charge_sets():
    d = {(t, r, s): susy.d_coeff(t, r, s, 2) for t in (1, 2, 3) for r in (1, 2) for s in (1, 2)}
    listed = {(2, 1, 2): -2, (2, 2, 1): -2, (2, 1, 1): 0, (2, 2, 2): 0,
              (3, 1, 1): -1, (3, 1, 2): 1, (3, 2, 1): 1, (3, 2, 2): -1}
    d_ok = all(d[k] == v for k, v in listed.items()) and all(d[(1, r, s)] == 0 for r in (1, 2) for s in (1, 2))
    params = random_admissible(np.random.default_rng(606), 3)
    counts, worst = [], 0.0
    for mu in range(3):
        cs = susy.build_charge_set(build_fock(params, 30), mu)
        found = susy.find_mixed_relations(cs, 1e-9)
        counts.append(len(found.relations))
        worst = max([worst] + [susy.mixed_relation_residual(cs, r) for r in found.relations])
    record(6, d_ok and counts == [6, 6, 6] and worst <= 1e-9,
           f"d table exact: {d_ok}, relations per mu {counts}, worst residual {worst:.2e}")


def test_criterion_07_pseudo():
    rng = np.random.default_rng(707)
    failures, worst_eq = [], 0.0
    for _ in range(10):
        params = random_admissible(rng, 3)
        rep = build_fock(params, 36)
        c = float(rng.uniform(0.3, 2.0)) * rng.choice([-1, 1])
        for mu in range(3):
            reals = [susy.pseudo_build(rep, "one", mu, c, eta=float(rng.uniform(0.05, 1.95)) * abs(c),
                                       phi=float(rng.uniform(0, 2 * np.pi))),
                     susy.pseudo_build(rep, "two", mu, c, r_mu=float(rng.uniform(-3, 3)))]
            for real in reals:
                for r in (real, susy.pseudo_mirror(real)):
                    failures += [f"{r.family} mu={mu}: {x.name}" for x in susy.pseudo_verify(r, 1e-10).failures()]
            one = susy.pseudo_build(rep, "one", mu, c, eta=np.sqrt(2) * abs(c), phi=0.0)
            worst_eq = max(worst_eq, float(np.max(np.abs(one.H - susy.pssqm_build(rep, mu).H))))
    record(7, not failures and worst_eq <= 1e-12,
           f"{len(failures)} relation failures, max |H_one - H_pssqm| {worst_eq:.1e}")


def test_criterion_08_ossqm():
    rep0 = build_fock(new_algebra(3, [0, -1]), 30)
    s0 = susy.realization_spectrum(susy.ossqm_build(rep0, 0))
    rep1 = build_fock(new_algebra(3, [1, 0]), 30)
    s1 = susy.realization_spectrum(susy.ossqm_build(rep1, 1))
    cases_ok = (abs(s0.ground_energy - 1) < 1e-12 and s0.ground_degeneracy == 3
                and abs(s1.ground_energy) < 1e-12 and s1.ground_degeneracy == 1)
    failures, h_gap = [], 0.0
    rng = np.random.default_rng(808)
    for rep, mu in ((rep0, 0), (rep1, 1)):
        ref = susy.ossqm_build(rep, mu)
        for _ in range(10):
            real = susy.ossqm_build(rep, mu, xi=float(rng.uniform(0.01, np.sqrt(2))),
                                    phi=float(rng.uniform(0, 2 * np.pi)))
            failures += [x.name for x in susy.ossqm_verify(real, 1e-10).failures()]
            h_gap = max(h_gap, float(np.max(np.abs(real.H - ref.H))))
    record(8, cases_ok and not failures and h_gap <= 1e-10,
           f"mu=0: E0={s0.ground_energy:g} x{s0.ground_degeneracy}; mu=1: E0={s1.ground_energy:g} "
           f"x{s1.ground_degeneracy}; {len(failures)} relation failures; H gap over (xi, phi) {h_gap:.1e}")


def test_criterion_09_deformations():
    rng = np.random.default_rng(909)
    worst = 0.0
    beta_gap = 0.0
    algebras = []
    for q in (0.5, 0.8, 1.3, 2.0):
        for ah in (0.0, 0.3, -0.3):
            algebras.append(deform.make_cv_algebra(q, ah))
        algebras.append(deform.make_deformed("A", 2, [0.4, -0.4], q, E=ScalarSequence.power(1.5, 0.9)))
        for lam in (3, 4, 5):
            alpha = new_algebra(lam, rng.uniform(-0.5, 0.5, size=lam - 1)).alpha
            k = float(rng.uniform(0.3, 1.7))
            if abs(k - q) > 1e-3 and abs(k + q) > 1e-3:
                algebras.append(deform.make_deformed("B", lam, alpha, q, k=k, B=1.0, b=0.7))
            algebras.append(deform.make_deformed("C", lam, alpha, q, B=0.6, b=1.2))
    for defa in algebras:
        worst = max(worst, *deform.funct_residuals(defa, 40))
        b1, b2 = deform.beta_from_functional(defa, 1), deform.beta_from_functional(defa, 6)
        beta_gap = max(beta_gap, float(np.max(np.abs(b1 - b2))))
    cv_gap = 0.0
    for q in (0.5, 2.0):
        for ah in (0.0, 0.3, -0.3):
            for n0 in (0, 1):
                rec = deform.cv_lambda_recursion(q, ah, n0, 0.0, 40)
                closed = np.array([deform.cv_lambda_closed_form(q, ah, n0, 0.0, n) for n in range(41)])
                cv_gap = max(cv_gap, float(np.max(np.abs(closed - rec) / np.maximum(1.0, np.abs(rec)))))
    rejected = 0
    for attempt in (lambda: deform.make_deformed("B", 4, [0.3, -0.1, 0.2, -0.4], 1.2, k=-1.2, B=1.0, b=1.0),
                    lambda: deform.make_deformed("B", 6, [0.1] * 5 + [-0.5], 0.7, k=-0.7, B=1.0, b=1.0),
                    lambda: deform.make_deformed("A", 2, [0.3, -0.3], 1.5, E=ScalarSequence.power(2.0, -1.5))):
        try:
            attempt()
        except RejectedFamily:
            rejected += 1
    record(9, worst <= 1e-10 and cv_gap <= 1e-10 and rejected == 3 and beta_gap <= 1e-10,
           f"{len(algebras)} algebras, funct residual {worst:.1e}, CV lambda_n gap {cv_gap:.1e}, "
           f"rejected {rejected}/3, beta gap {beta_gap:.1e}")


CLI_MATRIX = [
    ("algebra info --lambda 3 --alpha=1,0", 0),
    ("classify --lambda 4 --alpha=0.3,-0.2,0.5", 0),
    ("spectrum h0 --lambda 3 --alpha=2,-1 --format csv", 0),
    ("spectrum pssqm --p 2 --alpha=1,0", 0),
    ("spectrum pseudo --lambda 3 --alpha=0.3,0.2", 0),
    ("spectrum ossqm --lambda 3 --alpha=1,0 --mu 1", 0),
    ("fock verify --lambda 4 --alpha=0.5,0.2,-0.1", 0),
    ("susy pssqm --p 3 --alpha=0.2,0.1,-0.4 --mu 1", 0),
    ("susy pseudo --lambda 3 --alpha=0.3,0.2 --family two --r-mu 2", 0),
    ("susy ossqm --lambda 3 --alpha=0,-1", 0),
    ("deform verify --family a --q 2 --alpha-hat 0.3", 0),
    ("deform verify --family c --lambda 3 --alpha=0.3,0.2 --q 1.2", 0),
    ("tables 3 --samples 5", 0),
    ("fock verify --lambda 4 --alpha=0.5,0.2,-0.1 --tol 1e-40", 1),
    ("susy pssqm --p 2 --alpha=0.3,0.2 --tol 1e-40", 1),
    ("classify --lambda 3", 2),
    ("spectrum bogus --lambda 3 --alpha=0,0", 2),
    ("fock verify --lambda 3 --alpha=-3,0", 2),
    ("deform verify --family b --lambda 4 --alpha=0.3,-0.1,0.2 --q 1.2 --k -1.2", 2),
    ("susy ossqm --lambda 3 --alpha=0.3,0.2", 2),
]


def test_criterion_10_cli():
    wrong, invalid = [], []
    for args, expect in CLI_MATRIX:
        code, out, _ = run(args.split())
        if code != expect:
            wrong.append((args, code))
        if code in (0, 1) and "--format csv" not in args:
            try:
                jsonschema.validate(json.loads(out), REPORT_SCHEMA)
            except (jsonschema.ValidationError, json.JSONDecodeError) as exc:
                invalid.append((args, str(exc)[:60]))
    record(10, not wrong and not invalid,
           f"{len(CLI_MATRIX)} invocations, {len(wrong)} wrong exit codes {wrong[:2]}, {len(invalid)} schema errors")


if __name__ == "__main__":
    start = time.time()
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
    print(f"elapsed {time.time() - start:.1f}s")
