from itertools import combinations, product

import numpy as np
import pytest

from kspin import pauli
from kspin.errors import ResourceError

from oracles import kron_matrix, kron_sum

RNG = np.random.default_rng(20240801)


@pytest.mark.parametrize("L,k,expected", [(2, 2, 9), (4, 2, 54), (3, 3, 27)])
def test_enumeration_count(L, k, expected):
    terms = pauli.enumerate_k_local_terms(L, k)
    assert len(terms) == expected
    # brute-force recount, independent of the library's iteration order
    brute = {
        (sites, axes)
        for sites in combinations(range(L), k)
        for axes in product("xyz", repeat=k)
    }
    assert {(t.sites, t.axes) for t in terms} == brute


def test_enumeration_order_is_lexicographic_and_stable():
    terms = pauli.enumerate_k_local_terms(3, 2)
    keys = [(t.sites, t.axes) for t in terms]
    assert keys == sorted(keys)
    assert keys[0] == ((0, 1), ("x", "x"))
    assert keys[:3] == [((0, 1), ("x", "x")), ((0, 1), ("x", "y")), ((0, 1), ("x", "z"))]
    assert terms == pauli.enumerate_k_local_terms(3, 2)


@pytest.mark.parametrize("L,k", [(0, 1), (3, 0), (3, 4)])
def test_enumeration_rejects_bad_locality(L, k):
    with pytest.raises(ValueError):
        pauli.enumerate_k_local_terms(L, k)


def test_term_validation():
    with pytest.raises(ValueError):
        pauli.PauliTerm((1, 0), ("x", "x"))
    with pytest.raises(ValueError):
        pauli.PauliTerm((0, 1), ("x", "q"))
    with pytest.raises(ValueError):
        pauli.PauliTerm((0,), ("x", "y"))
    term = pauli.PauliTerm((0, 2), ("x", "z"))
    with pytest.raises(ValueError):
        term.validate_for(2)


def test_single_site_z_matrix():
    term = pauli.PauliTerm((0,), ("z",))
    assert np.array_equal(pauli.pauli_matrix(term, 1), np.diag([1.0 + 0j, -1.0 + 0j]))


def test_two_site_xx_is_antidiagonal():
    term = pauli.PauliTerm((0, 1), ("x", "x"))
    assert np.array_equal(pauli.pauli_matrix(term, 2), np.fliplr(np.eye(4, dtype=complex)))


def test_matrix_matches_kron_oracle_exactly():
    for k in (1, 2, 3, 4):
        for term in pauli.enumerate_k_local_terms(4, k):
            assert np.array_equal(pauli.pauli_matrix(term, 4), kron_matrix(term, 4))


def test_matrix_invariants_dense():
    # Hermitian, involutory, traceless for every enumerated term at small L.
    for L, k in [(4, 1), (4, 2), (4, 3), (4, 4), (5, 2), (5, 5)]:
        for term in pauli.enumerate_k_local_terms(L, k):
            m = pauli.pauli_matrix(term, L)
            assert np.array_equal(m, m.conj().T)
            assert np.array_equal(m @ m, np.eye(1 << L, dtype=complex))
            assert np.trace(m) == 0


def test_matrix_resource_budget():
    term = pauli.PauliTerm((0,), ("x",))
    with pytest.raises(ResourceError):
        pauli.pauli_matrix(term, 20)
    with pytest.raises(ResourceError):
        pauli.pauli_matrix(term, 8, max_sites=7)


def test_apply_trivial_cases():
    z0 = pauli.PauliTerm((0,), ("z",))
    assert np.array_equal(pauli.apply_pauli(z0, np.array([1.0, 0.0])), np.array([1, 0]))
    xx = pauli.PauliTerm((0, 1), ("x", "x"))
    out = pauli.apply_pauli(xx, np.array([1.0, 0.0, 0.0, 0.0]))
    assert np.array_equal(out, np.array([0, 0, 0, 1.0]))


def test_apply_matches_dense_on_random_pairs():
    for _ in range(100):
        L = int(RNG.integers(2, 7))
        k = int(RNG.integers(1, L + 1))
        terms = pauli.enumerate_k_local_terms(L, k)
        term = terms[int(RNG.integers(len(terms)))]
        vec = RNG.standard_normal(1 << L) + 1j * RNG.standard_normal(1 << L)
        expected = kron_matrix(term, L) @ vec
        assert np.abs(pauli.apply_pauli(term, vec) - expected).max() < 1e-12


def test_apply_rejects_bad_lengths():
    term = pauli.PauliTerm((0,), ("x",))
    with pytest.raises(ValueError):
        pauli.apply_pauli(term, np.ones(3))
    far = pauli.PauliTerm((5,), ("x",))
    with pytest.raises(ValueError):
        pauli.apply_pauli(far, np.ones(4))


def test_trace_inner_product_cases():
    a = pauli.PauliTerm((0, 1), ("x", "y"))
    b = pauli.PauliTerm((0, 1), ("x", "z"))
    assert pauli.trace_inner_product(a, a, 3) == 8
    assert pauli.trace_inner_product(a, b, 3) == 0


def test_trace_inner_product_matches_dense_all_pairs():
    terms = pauli.enumerate_k_local_terms(4, 1) + pauli.enumerate_k_local_terms(4, 2)
    mats = [kron_matrix(t, 4) for t in terms]
    for i, a in enumerate(terms):
        for j, b in enumerate(terms):
            dense = complex(np.trace(mats[i] @ mats[j]))
            assert abs(dense.imag) < 1e-12
            assert pauli.trace_inner_product(a, b, 4) == pytest.approx(dense.real, abs=1e-9)


@pytest.mark.parametrize("L,k", [(3, 2), (4, 2), (4, 3), (5, 1)])
def test_dense_assembly_matches_kron_sum(L, k):
    basis = pauli.get_basis(L, k)
    coeffs = RNG.standard_normal(len(basis))
    assert np.abs(basis.to_dense(coeffs) - kron_sum(basis.terms, coeffs, L)).max() < 1e-13


def test_dense_assembly_validates_coefficients():
    basis = pauli.get_basis(3, 2)
    with pytest.raises(ValueError):
        basis.to_dense(np.ones(5))
