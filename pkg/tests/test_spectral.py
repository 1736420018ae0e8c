import numpy as np
import pytest

from kspin import ensemble, spectral, theory

RNG = np.random.default_rng(22)


def disordered(L, k, realization, sigma=1.0, mu=0.0):
    p = ensemble.EnsembleParams(L=L, k=k, mu=mu, sigma=sigma)
    return ensemble.build_hamiltonian(p, ensemble.sample_couplings(p, realization))


def test_diagonal_matrix():
    spec = spectral.eigendecompose(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(spec.eigenvalues, [1.0, 2.0, 3.0])


def test_disorder_free_matches_analytic_multiset():
    matrix = ensemble.deterministic_hamiltonian(4, 2, mu=1.0)
    spec = spectral.eigendecompose(matrix)
    expected = theory.disorder_free_spectrum(4, 2, 1.0).as_multiset()
    assert np.abs(spec.eigenvalues - expected).max() < 1e-10


def test_reconstruction_and_orthonormality():
    a = RNG.standard_normal((50, 50))
    a = a + a.T
    spec = spectral.eigendecompose(a, want_vectors=True)
    v = spec.eigenvectors
    assert np.abs(v.conj().T @ v - np.eye(50)).max() < 1e-10
    rebuilt = (v * spec.eigenvalues) @ v.conj().T
    assert np.abs(rebuilt - a).max() < 1e-9 * np.abs(a).max()
    assert spec.residual_bound < 1e-8 * np.linalg.norm(a, 2)


def test_reconstruction_dense_complex_instance():
    matrix = disordered(8, 3, 0)
    spec = spectral.eigendecompose(matrix, want_vectors=True)
    v = spec.eigenvectors
    rebuilt = (v * spec.eigenvalues) @ v.conj().T
    assert np.abs(rebuilt - matrix).max() < 1e-9 * np.abs(matrix).max()


def test_rejects_non_hermitian():
    with pytest.raises(ValueError):
        spectral.eigendecompose(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_detect_degeneracies_simple():
    found = spectral.detect_degeneracies(np.array([0.0, 0.0, 1.0]), tol=1e-8)
    assert found == [(0.0, 2), (1.0, 1)]
    assert sum(m for _, m in found) == 3


def test_kramers_pairing_odd_L_even_k():
    # Antiunitary symmetry with negative square forces exact double degeneracy.
    for L, k in [(5, 2), (5, 4), (7, 2), (7, 4)]:
        for r in range(3):
            spec = spectral.eigendecompose(disordered(L, k, r))
            clusters = spectral.detect_degeneracies(spec)
            assert all(mult == 2 for _, mult in clusters), (L, k, r)
            scale = np.abs(spec.eigenvalues).max()
            splits = spec.eigenvalues[1::2] - spec.eigenvalues[0::2]
            assert splits.max() / scale < 1e-10


def test_no_degeneracy_even_L_even_k():
    spec = spectral.eigendecompose(disordered(4, 2, 0))
    assert all(mult == 1 for _, mult in spectral.detect_degeneracies(spec))


def test_degeneracy_sector_picks_even_indices():
    assert np.array_equal(
        spectral.degeneracy_sector(np.array([1.0, 2.0, 3.0, 4.0])).eigenvalues,
        [1.0, 3.0],
    )
    assert np.array_equal(
        spectral.degeneracy_sector(np.array([5.0, 5.0, 7.0, 7.0])).eigenvalues,
        [5.0, 7.0],
    )
    with pytest.raises(ValueError):
        spectral.degeneracy_sector(np.array([1.0, 2.0, 3.0]))


def test_symmetry_defect():
    assert spectral.spectral_symmetry_defect(np.array([-2.0, -1.0, 1.0, 2.0])) == 0.0
    # odd locality anticommutes with time reversal: mirror-symmetric spectrum
    for r in range(3):
        spec = spectral.eigendecompose(disordered(6, 3, r))
        assert spectral.spectral_symmetry_defect(spec) < 1e-9
    # even locality has no such mirror
    spec = spectral.eigendecompose(disordered(6, 2, 0))
    assert spectral.spectral_symmetry_defect(spec) > 1e-2
