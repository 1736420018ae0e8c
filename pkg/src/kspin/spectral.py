"""Dense Hermitian eigendecomposition and spectrum-level utilities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError

#: Degeneracy threshold, relative to the mean level spacing.
DEGENERACY_TOL = 1e-8

_HERMITICITY_TOL = 1e-10


@dataclass(eq=False)
class Spectrum:
    """Sorted eigenvalues, optionally with eigenvectors and a residual bound."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None
    residual_bound: float | None = None

    def __len__(self) -> int:
        return len(self.eigenvalues)


def _as_eigenvalues(spectrum) -> np.ndarray:
    if isinstance(spectrum, Spectrum):
        return spectrum.eigenvalues
    return np.asarray(spectrum, dtype=float)


def eigendecompose(matrix: np.ndarray, want_vectors: bool = False) -> Spectrum:
    """Exact dense eigendecomposition of a Hermitian matrix.

    Real-symmetric inputs (or complex ones with identically zero imaginary
    part) are routed to the real LAPACK path, which is substantially faster.

    Raises
    ------
    ValueError
        If the input is not Hermitian within 1e-10 relative.
    NumericError
        If the LAPACK solver fails to converge.
    """
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
    scale = max(np.abs(matrix).max(), 1e-300)
    defect = np.abs(matrix - matrix.conj().T).max()
    if defect > _HERMITICITY_TOL * scale:
        raise ValueError(
            f"matrix is not Hermitian: max |H - H^dag| = {defect:.3e} "
            f"exceeds {_HERMITICITY_TOL:.0e} * {scale:.3e}"
        )
    work = matrix
    if np.iscomplexobj(work) and not work.imag.any():
        work = work.real
    try:
        if want_vectors:
            values, vectors = np.linalg.eigh(work)
        else:
            values = np.linalg.eigvalsh(work)
            vectors = None
    except np.linalg.LinAlgError as exc:
        raise NumericError(
            f"eigensolver failed on a {matrix.shape[0]}x{matrix.shape[0]} matrix "
            f"(scale {scale:.3e}): {exc}"
        ) from exc
    residual = None
    if vectors is not None:
        residual = float(
            np.linalg.norm(work @ vectors - vectors * values, axis=0).max()
        )
    return Spectrum(
        eigenvalues=np.asarray(values, dtype=float),
        eigenvectors=vectors,
        residual_bound=residual,
    )


def detect_degeneracies(spectrum, tol: float = DEGENERACY_TOL) -> list[tuple[float, int]]:
    """Cluster eigenvalues whose gaps are below ``tol`` x mean level spacing.

    Returns (cluster mean, multiplicity) pairs; multiplicities sum to the
    spectrum dimension.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    eigs = _as_eigenvalues(spectrum)
    n = len(eigs)
    if n == 0:
        return []
    if n == 1:
        return [(float(eigs[0]), 1)]
    mean_spacing = (eigs[-1] - eigs[0]) / (n - 1)
    if mean_spacing == 0.0:
        return [(float(eigs[0]), n)]
    breaks = np.flatnonzero(np.diff(eigs) > tol * mean_spacing) + 1
    return [
        (float(cluster.mean()), len(cluster)) for cluster in np.split(eigs, breaks)
    ]


def degeneracy_sector(spectrum) -> Spectrum:
    """Halve a pairwise-degenerate spectrum: keep eigenvalues at even indices."""
    eigs = _as_eigenvalues(spectrum)
    if len(eigs) % 2 != 0:
        raise ValueError(f"spectrum length {len(eigs)} is odd; cannot halve")
    return Spectrum(eigenvalues=eigs[0::2].copy())


def spectral_symmetry_defect(spectrum) -> float:
    """max_i |E_i + E_{N-1-i}| / max |E|; near zero iff symmetric about 0."""
    eigs = _as_eigenvalues(spectrum)
    if len(eigs) == 0:
        return 0.0
    scale = np.abs(eigs).max()
    if scale == 0.0:
        return 0.0
    return float(np.abs(eigs + eigs[::-1]).max() / scale)
