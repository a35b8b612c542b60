import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clext import susy
from clext.algebra import new_algebra
from clext.errors import InvalidParameters, NotApplicable
from clext.fock import build_fock

from conftest import random_admissible


def _spectrum_by_brute_force(h, m):
    return np.sort(np.linalg.eigvalsh(h[:m, :m]))


@given(st.integers(1, 4), st.integers(0, 2**31 - 1), st.data())
@settings(max_examples=25, deadline=None)
def test_pssqm_relations(p, seed, data):
    mu = data.draw(st.integers(0, p))
    params = random_admissible(np.random.default_rng(seed), p + 1)
    real = susy.pssqm_build(build_fock(params, 10 * (p + 1)), mu)
    rpt = susy.pssqm_verify(real)
    assert rpt.passed, rpt.failures()


@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_r_recursion_and_explicit_form(p, rng):
    params = random_admissible(rng, p + 1)
    for mu in range(p + 1):
        r = susy.pssqm_r_coeffs(params, mu)
        assert susy.pssqm_recursion_residual(params, mu, r) < 1e-12
        explicit = susy.pssqm_r_explicit(params, mu, r[(mu + 2) % (p + 1)])
        np.testing.assert_allclose(explicit, r, atol=1e-12)
        assert susy.pssqm_ground_energy(params, mu) == pytest.approx(
            susy.pssqm_ground_energy_gamma_form(params, mu), abs=1e-12)


def test_pssqm_spectrum_matches_eigenvalues(rng):
    params = random_admissible(rng, 3)
    rep = build_fock(params, 45)
    for mu in range(3):
        real = susy.pssqm_build(rep, mu)
        spec = susy.pssqm_spectrum(params, mu, 3)
        closed = np.sort([lv.energy for lv in spec.levels])
        eig = _spectrum_by_brute_force(real.H, len(closed))
        np.testing.assert_allclose(eig, closed, atol=1e-10)
        assert spec.ground_degeneracy == mu + 1
        assert set(spec.excited_degeneracies) == {3}


def test_custom_eta_still_verifies():
    params = new_algebra(3, [0.3, 0.2])
    eta = np.array([1.0, np.sqrt(3.0)])
    real = susy.pssqm_build(build_fock(params, 30), 1, eta)
    assert susy.pssqm_verify(real).passed
    with pytest.raises(InvalidParameters):
        susy.pssqm_build(build_fock(params, 30), 1, [1.0, 1.0])


def test_pssqm_order_one_is_ssqm():
    params = new_algebra(2, [0.4])
    spec = susy.pssqm_spectrum(params, 0, 2)
    assert spec.ground_energy == pytest.approx(0.0, abs=1e-12)
    assert spec.report.passed


def special_alpha(p, mu, a0=0.7):
    """Full alpha with alpha_(mu+nu) = -1 for nu = 2..p and the given alpha_0."""
    lam = p + 1
    alpha = np.full(lam, np.nan)
    for nu in range(2, p + 1):
        alpha[(mu + nu) % lam] = -1.0
    alpha[0] = a0
    free = np.flatnonzero(np.isnan(alpha))
    alpha[free] = -np.nansum(alpha) / len(free)
    return alpha


@pytest.mark.parametrize("p", [2, 3, 4])
@pytest.mark.parametrize("mu_at", ["zero", "top"])
def test_special_case(p, mu_at):
    mu = 0 if mu_at == "zero" else p
    alpha = special_alpha(p, mu)
    params = new_algebra(p + 1, alpha[:-1])
    assert susy.special_case_applies(params, mu)
    sc = susy.pssqm_special_case(build_fock(params, 12 * (p + 1)), mu)
    assert sc.report.passed, sc.report.failures()
    expect = 0.0 if mu == 0 else alpha[0] + 1
    assert sc.spectrum.ground_energy == pytest.approx(expect, abs=1e-8)


def test_special_case_not_applicable():
    with pytest.raises(NotApplicable):
        susy.pssqm_special_case(build_fock(new_algebra(3, [0.3, 0.2]), 30), 0)


def test_d_table_p2():
    d = np.array([[[susy.d_coeff(t, r, s, 2) for s in (1, 2)] for r in (1, 2)] for t in (1, 2, 3)])
    assert d[0].tolist() == [[0, 0], [0, 0]]
    assert d[1].tolist() == [[0, -2], [-2, 0]]
    assert d[2].tolist() == [[-1, 1], [1, -1]]


@pytest.mark.parametrize("p", [2, 3])
def test_charge_set_identities(p, rng):
    params = random_admissible(rng, p + 1)
    cs = susy.build_charge_set(build_fock(params, 12 * (p + 1)), 0)
    rpt = susy.verify_charge_set(cs, rng=rng, product_samples=30)
    assert rpt.passed, rpt.failures()


def test_B_value_matches_products():
    # brute force: product of b's read off the diagonal action
    for seq in itertools.product((1, 2, 3), repeat=2):
        for nu in (1, 2):
            expect = susy.b_coeff(seq[0], nu + 1) * susy.b_coeff(seq[1], nu)
            assert susy.B_value(seq, nu) == expect


def test_mixed_relations_p2(rng):
    params = random_admissible(rng, 3)
    cs = susy.build_charge_set(build_fock(params, 30), 1)
    found = susy.find_mixed_relations(cs)
    assert len(found.relations) == 6
    assert found.report.passed
    for rel in found.relations:
        assert susy.mixed_relation_residual(cs, rel) < 1e-9


def test_mixed_relations_p1_is_plain_ssqm():
    cs = susy.build_charge_set(build_fock(new_algebra(2, [0.3]), 20), 0)
    assert len(susy.find_mixed_relations(cs).relations) == 1


@pytest.mark.parametrize("family", ["one", "two"])
@pytest.mark.parametrize("mu", [0, 1, 2])
def test_pseudo_families(family, mu, rng):
    params = random_admissible(rng, 3)
    rep = build_fock(params, 30)
    kw = {"eta": 0.9, "phi": 0.4} if family == "one" else {"r_mu": 1.7}
    real = susy.pseudo_build(rep, family, mu, 1.3, **kw)
    assert susy.pseudo_verify(real).passed
    assert susy.pseudo_verify(susy.pseudo_mirror(real)).passed


def test_pseudo_one_reduces_to_pssqm():
    params = new_algebra(3, [0.3, 0.2])
    rep = build_fock(params, 30)
    for mu in range(3):
        real = susy.pseudo_build(rep, "one", mu, 1.0)
        assert np.max(np.abs(real.H - susy.pssqm_build(rep, mu).H)) <= 1e-12


def test_pseudo_guards():
    rep = build_fock(new_algebra(3, [0.3, 0.2]), 30)
    with pytest.raises(InvalidParameters):
        susy.pseudo_build(rep, "one", 0, 1.0, eta=2.0)
    with pytest.raises(InvalidParameters):
        susy.pseudo_build(rep, "two", 0, 1.0)
    with pytest.raises(InvalidParameters):
        susy.pseudo_build(rep, "three", 0, 1.0)


def test_pseudo_two_equal_spacing():
    params = new_algebra(3, [0.3, 0.2])
    rep = build_fock(params, 30)
    r_mu = susy.pseudo_equal_spacing_r_mu(params, 0)
    spec = susy.realization_spectrum(susy.pseudo_build(rep, "two", 0, 1.0, r_mu=r_mu))
    gaps = np.diff(sorted({round(lv.energy, 9) for lv in spec.levels}))
    np.testing.assert_allclose(gaps, gaps[0])


@pytest.mark.parametrize("mu, free, e0, deg", [(0, [0, -1], 1.0, 3), (1, [1, 0], 0.0, 1)])
def test_ossqm_examples(mu, free, e0, deg):
    params = new_algebra(3, free)
    rep = build_fock(params, 30)
    real = susy.ossqm_build(rep, mu)
    assert susy.ossqm_verify(real).passed
    spec = susy.realization_spectrum(real)
    assert spec.ground_energy == pytest.approx(e0, abs=1e-12)
    assert spec.ground_degeneracy == deg
    other = susy.ossqm_build(rep, mu, xi=0.6, phi=1.1)
    assert np.max(np.abs(other.H - real.H)) < 1e-12
    assert susy.ossqm_verify(other).passed


def test_ossqm_needs_pattern():
    rep = build_fock(new_algebra(3, [0.3, 0.2]), 30)
    with pytest.raises(NotApplicable):
        susy.ossqm_build(rep, 0)
