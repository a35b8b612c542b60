import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clext.algebra import new_algebra
from clext.errors import InvalidParameters, TruncationTooSmall
from clext.fock import (build_fock, casimir_matrices, group_levels, h0_anticommutator, h0_matrix,
                        h0_spectrum, levels_to_csv, perturbed, spectrum_matches_matrix,
                        verify_defining_relations)

from conftest import random_admissible


def _naive_adag(params, dim):
    # independent construction straight from F(n) = n + beta_(n mod lam)
    m = np.zeros((dim, dim))
    for n in range(1, dim):
        m[n, n - 1] = np.sqrt(n + params.beta[n % params.lam])
    return m


@given(st.integers(2, 6), st.integers(0, 2**31 - 1))
@settings(max_examples=25, deadline=None)
def test_defining_relations_hold(lam, seed):
    params = random_admissible(np.random.default_rng(seed), lam)
    rep = build_fock(params, 10 * lam)
    np.testing.assert_allclose(rep.a_dag.real, _naive_adag(params, 10 * lam), atol=1e-14)
    rpt = verify_defining_relations(rep)
    assert rpt.passed, rpt.failures()
    _, _, _, crpt = casimir_matrices(rep)
    assert crpt.passed, crpt.failures()


def test_fault_injection_detected():
    rep = build_fock(new_algebra(3, [0.3, 0.2]), 30)
    bad = perturbed(rep, 5, 4, 1e-6)
    rpt = verify_defining_relations(bad)
    assert not rpt.passed
    assert "[a,a_dag]=I+sum alpha P" in {c.name for c in rpt.failures()}


def test_guards():
    with pytest.raises(InvalidParameters):
        build_fock(new_algebra(3, [-1.5, 0.0]), 30)
    with pytest.raises(InvalidParameters):
        build_fock(new_algebra(3, [0.0, 0.0]), 31)
    with pytest.raises(TruncationTooSmall):
        verify_defining_relations(build_fock(new_algebra(3, [0.0, 0.0]), 6))


def test_h0_example_from_gamma():
    # alpha = (2, -1, -1): gamma = (1, 1.5, 0.5)
    levels = h0_spectrum(new_algebra(3, [2, -1]), 1)
    assert [lv.energy for lv in levels] == [1.5, 3, 3, 4.5, 6, 6]
    assert [lv.degeneracy for lv in levels] == [1, 2, 2, 1, 2, 2]


def test_h0_second_example():
    levels = h0_spectrum(new_algebra(3, [1, 0]), 1)
    assert [lv.energy for lv in levels] == [1, 2.5, 3, 4, 5.5, 6]


@given(st.integers(2, 5), st.integers(0, 2**31 - 1))
@settings(max_examples=20, deadline=None)
def test_h0_closed_form_vs_matrix(lam, seed):
    params = random_admissible(np.random.default_rng(seed), lam)
    rep = build_fock(params, 8 * lam)
    m = rep.interior()
    energies = [lv.energy for lv in h0_spectrum(params, 8)]
    assert spectrum_matches_matrix(energies, h0_anticommutator(rep), m) < 1e-10
    assert spectrum_matches_matrix(energies, h0_matrix(rep), m) < 1e-10


def test_group_levels_tolerance():
    assert group_levels([1.0, 1.0 + 1e-12, 2.0]) == [(0, 2), (0, 2), (1, 1)]
    assert group_levels([2.0, 1.0]) == [(1, 1), (0, 1)]


def test_levels_csv():
    text = levels_to_csv(h0_spectrum(new_algebra(2, [0.0]), 0))
    assert text.splitlines() == ["n,k,mu,energy", "0,0,0,0.5", "1,0,1,1.5"]
