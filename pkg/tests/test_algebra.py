import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clext.algebra import (AlgebraParams, alphas_from_kappas, g_function, grade, kappas_from_alphas,
                           new_algebra, structure_function, structure_values)
from clext.errors import InvalidParameters

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


@st.composite
def algebras(draw, max_lam=6):
    lam = draw(st.integers(2, max_lam))
    free = draw(st.lists(finite, min_size=lam - 1, max_size=lam - 1))
    return new_algebra(lam, free)


def test_derived_tables_small_example():
    p = new_algebra(3, [2, -1])
    assert p.alpha.tolist() == [2, -1, -1]
    assert p.beta.tolist() == [0, 2, 1]
    assert p.gamma.tolist() == [1, 1.5, 0.5]
    np.testing.assert_allclose(p.beta_bar, [0, 1, 1])


def test_index_helpers_wrap():
    p = new_algebra(3, [2, -1])
    assert grade(-1, 3) == 2
    assert p.a(4) == p.alpha[1]
    assert p.b(-1) == p.beta[2]


@given(algebras())
@settings(max_examples=60, deadline=None)
def test_structure_function_recursion(p):
    # F(n+1) - F(n) = G(n), F(0) = 0
    n = np.arange(4 * p.lam)
    f = structure_values(p, np.arange(4 * p.lam + 1))
    assert f[0] == 0
    g = np.array([g_function(p, k) for k in n])
    np.testing.assert_allclose(np.diff(f), g, atol=1e-12)
    assert structure_function(p, 5) == pytest.approx(f[5])


@given(algebras())
@settings(max_examples=60, deadline=None)
def test_beta_periodic_and_alternating_gamma(p):
    assert p.beta[0] == 0
    assert abs(p.beta[-1] + p.alpha[-1]) < 1e-9  # beta_lam = 0
    signs = (-1.0) ** np.arange(p.lam)
    assert abs(np.dot(signs, p.gamma)) < 1e-9


@given(algebras())
@settings(max_examples=40, deadline=None)
def test_kappa_roundtrip(p):
    np.testing.assert_allclose(alphas_from_kappas(kappas_from_alphas(p)), p.alpha, atol=1e-10)


@pytest.mark.parametrize("lam, alpha", [(1, [0.0]), (3, [1.0, 0.0]), (3, [1.0, 1.0, 1.0]), (2, [np.nan, 0])])
def test_rejects_bad_params(lam, alpha):
    with pytest.raises(InvalidParameters):
        AlgebraParams(lam, np.asarray(alpha))


def test_new_algebra_wrong_length():
    with pytest.raises(InvalidParameters):
        new_algebra(3, [1.0])


def test_params_immutable():
    p = new_algebra(2, [0.5])
    with pytest.raises(ValueError):
        p.alpha[0] = 1.0
    assert p.to_dict()["lambda"] == 2
