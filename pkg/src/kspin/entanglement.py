"""Bipartite von Neumann entanglement entropy of eigenstates.

Entropies are in natural-log units.  Subsystem site sets use the same
convention as the rest of the package: site 0 is the most significant bit of
the basis-state index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericError
from .spectral import Spectrum

_NORM_TOL = 1e-8
_EIG_CLIP = 1e-12
_EIG_FLOOR = -1e-8


def _split_axes(state: np.ndarray, subsystem, num_sites: int) -> np.ndarray:
    """Reshape a state into a (2^|A|, 2^|B|) matrix for the A|B bipartition."""
    subsystem = sorted(set(int(s) for s in subsystem))
    if not subsystem or len(subsystem) >= num_sites:
        raise ValueError("subsystem must be a nonempty proper subset of sites")
    if subsystem[0] < 0 or subsystem[-1] >= num_sites:
        raise ValueError(f"subsystem {subsystem} out of range for L={num_sites}")
    rest = [s for s in range(num_sites) if s not in subsystem]
    tensor = state.reshape((2,) * num_sites)
    tensor = tensor.transpose(subsystem + rest)
    return tensor.reshape(2 ** len(subsystem), 2 ** len(rest))


def _check_norm(state: np.ndarray) -> None:
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > _NORM_TOL:
        raise ValueError(f"state norm deviates from 1 by {abs(norm - 1.0):.3e}")


def reduced_density_matrix(state, subsystem, num_sites: int) -> np.ndarray:
    """Partial trace of |psi><psi| over the complement of ``subsystem``."""
    state = np.asarray(state)
    if state.shape != (1 << num_sites,):
        raise ValueError(
            f"state length {state.shape} does not match 2^{num_sites}"
        )
    _check_norm(state)
    block = _split_axes(state, subsystem, num_sites)
    return block @ block.conj().T


def _entropy_from_probabilities(p: np.ndarray) -> float:
    if p.min() < _EIG_FLOOR:
        raise NumericError(
            f"density-matrix eigenvalue {p.min():.3e} is significantly negative"
        )
    p = np.clip(p, 0.0, None)
    p = p[p > _EIG_CLIP]
    return float(-(p * np.log(p)).sum())


def von_neumann_entropy(rho: np.ndarray) -> float:
    """S = -Tr(rho ln rho) with 0 ln 0 := 0."""
    rho = np.asarray(rho)
    return _entropy_from_probabilities(np.linalg.eigvalsh(rho))


def entanglement_entropy(state, subsystem, num_sites: int) -> float:
    """Bipartite entropy of a pure state via the Schmidt decomposition.

    Equivalent to ``von_neumann_entropy(reduced_density_matrix(...))`` but
    better conditioned (singular values of the reshaped state).
    """
    state = np.asarray(state)
    if state.shape != (1 << num_sites,):
        raise ValueError(f"state length {state.shape} does not match 2^{num_sites}")
    _check_norm(state)
    singulars = np.linalg.svd(
        _split_axes(state, subsystem, num_sites), compute_uv=False
    )
    return _entropy_from_probabilities(singulars**2)


def page_value(L_A: int, L_B: int) -> float:
    """Mean entropy of a random pure state for a (L_A, L_B) qubit bipartition.

    ln m - m/(2n) with m = 2^min(L_A, L_B), n = 2^max(L_A, L_B); the roles of
    the arguments are interchangeable.
    """
    if L_A < 1 or L_B < 1:
        raise ValueError("both subsystem sizes must be at least 1")
    small, large = sorted((L_A, L_B))
    m = 2**small
    n = 2**large
    return small * math.log(2.0) - m / (2.0 * n)


def half_chain_windows(num_sites: int) -> list[list[int]]:
    """floor(L/2) contiguous windows of length floor(L/2), periodic wrap."""
    half = num_sites // 2
    return [
        [(offset + t) % num_sites for t in range(half)] for offset in range(half)
    ]


@dataclass(eq=False)
class EntropyProfile:
    """Per-eigenstate window-averaged entropies, plus the Page normalization."""

    eigenvalues: np.ndarray
    mean_entropy: np.ndarray
    normalized: np.ndarray
    page: float


def eigenstate_entropy_profile(spectrum: Spectrum, num_sites: int) -> EntropyProfile:
    """Window-averaged entanglement entropy for every eigenstate.

    Averages over the floor(L/2) periodic half-chain windows and normalizes
    by the Page value of the (floor(L/2), L - floor(L/2)) bipartition.
    """
    if spectrum.eigenvectors is None:
        raise ValueError("spectrum carries no eigenvectors")
    dim = 1 << num_sites
    vectors = spectrum.eigenvectors
    if vectors.shape[0] != dim:
        raise ValueError(f"eigenvector dimension {vectors.shape[0]} != 2^{num_sites}")
    half = num_sites // 2
    n_states = vectors.shape[1]
    totals = np.zeros(n_states)
    for window in half_chain_windows(num_sites):
        rest = [s for s in range(num_sites) if s not in window]
        perm = list(window) + rest
        # One batched SVD per window over all eigenstates.
        blocks = (
            vectors.T.reshape((n_states,) + (2,) * num_sites)
            .transpose([0] + [1 + p for p in perm])
            .reshape(n_states, 2**half, 2 ** (num_sites - half))
        )
        singulars = np.linalg.svd(blocks, compute_uv=False)
        probs = singulars**2
        probs = np.clip(probs, 0.0, None)
        safe = np.where(probs > _EIG_CLIP, probs, 1.0)
        totals += -(safe * np.log(safe)).sum(axis=1)
    mean_entropy = totals / half
    page = page_value(half, num_sites - half)
    return EntropyProfile(
        eigenvalues=spectrum.eigenvalues.copy(),
        mean_entropy=mean_entropy,
        normalized=mean_entropy / page,
        page=page,
    )


__all__ = [
    "EntropyProfile",
    "eigenstate_entropy_profile",
    "entanglement_entropy",
    "half_chain_windows",
    "page_value",
    "reduced_density_matrix",
    "von_neumann_entropy",
]
