"""Random-matrix diagnostics: gap ratios, unfolding, spacing surmises,
parity-based ensemble prediction, and explicit time-reversal checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import DataError, NumericError
from .spectral import Spectrum

#: Relative-to-mean-spacing threshold below which a spacing counts as an
#: unresolved degeneracy.
ZERO_SPACING_TOL = 1e-8

#: Fraction of levels dropped at each spectral edge for r statistics.
DEFAULT_EDGE_TRIM = 0.05

#: Default staircase fit degree and retained central fraction for unfolding.
DEFAULT_UNFOLD_DEGREE = 10
UNFOLD_KEEP_FRACTION = 0.8


class EnsembleClass(Enum):
    GOE = "GOE"
    GUE = "GUE"
    GSE = "GSE"
    POISSON = "Poisson"

    @property
    def reference_mean_r(self) -> float:
        return _REFERENCE_MEAN_R[self]


_REFERENCE_MEAN_R = {
    EnsembleClass.GOE: 0.53,
    EnsembleClass.GUE: 0.60,
    EnsembleClass.GSE: 0.67,
    EnsembleClass.POISSON: 0.386,
}


@dataclass(eq=False)
class LevelStatistics:
    """Gap-ratio summary over an ensemble of spectra."""

    r_values: np.ndarray
    mean_r: float
    sem: float
    spacing_edges: np.ndarray | None = None
    spacing_density: np.ndarray | None = None


def level_statistics(
    spectra,
    hist_bins: int = 50,
    hist_max: float = 4.0,
    fit_degree: int | None = DEFAULT_UNFOLD_DEGREE,
) -> LevelStatistics:
    """Pooled gap ratios and unfolded spacing histogram over an ensemble.

    Spectra must already be trimmed/sector-halved as appropriate.  Pass
    ``fit_degree=None`` to skip the spacing histogram (r statistics only).
    """
    collected = [_as_eigenvalues(s) for s in spectra]
    ratios = [gap_ratios(eigs) for eigs in collected]
    means = np.array([r.mean() for r in ratios])
    sem = (
        float(means.std(ddof=1) / math.sqrt(len(means))) if len(means) > 1 else 0.0
    )
    edges = None
    density = None
    if fit_degree is not None:
        spacings = np.concatenate(
            [np.diff(unfold(eigs, fit_degree=fit_degree)) for eigs in collected]
        )
        edges = np.linspace(0.0, hist_max, hist_bins + 1)
        density, _ = np.histogram(spacings, bins=edges, density=True)
    return LevelStatistics(
        r_values=np.concatenate(ratios),
        mean_r=float(means.mean()),
        sem=sem,
        spacing_edges=edges,
        spacing_density=density,
    )


def _as_eigenvalues(spectrum) -> np.ndarray:
    if isinstance(spectrum, Spectrum):
        return spectrum.eigenvalues
    return np.asarray(spectrum, dtype=float)


def trim_edges(eigenvalues, fraction: float = DEFAULT_EDGE_TRIM) -> np.ndarray:
    """Drop a fraction of levels at each spectral edge (nonthermal states)."""
    eigs = _as_eigenvalues(eigenvalues)
    if not 0 <= fraction < 0.5:
        raise ValueError(f"trim fraction must be in [0, 0.5), got {fraction}")
    cut = int(round(fraction * len(eigs)))
    return eigs[cut : len(eigs) - cut] if cut else eigs


def gap_ratios(spectrum) -> np.ndarray:
    """r_n = min(d_n, d_{n-1}) / max(d_n, d_{n-1}) over consecutive spacings.

    Raises DataError when a spacing is zero at the resolution of the mean
    level spacing; halve such spectra with ``degeneracy_sector`` first.
    """
    eigs = _as_eigenvalues(spectrum)
    if len(eigs) < 3:
        raise ValueError(f"need at least 3 levels, got {len(eigs)}")
    spacings = np.diff(eigs)
    mean_spacing = (eigs[-1] - eigs[0]) / (len(eigs) - 1)
    if mean_spacing <= 0 or np.any(spacings < ZERO_SPACING_TOL * mean_spacing):
        raise DataError(
            "spectrum contains (near-)zero spacings, i.e. unresolved "
            "degeneracies; apply degeneracy_sector before computing gap ratios"
        )
    return np.minimum(spacings[:-1], spacings[1:]) / np.maximum(
        spacings[:-1], spacings[1:]
    )


def mean_gap_ratio(spectra) -> tuple[float, float]:
    """Realization-wise mean gap ratios, averaged, with the standard error."""
    means = np.array([gap_ratios(s).mean() for s in spectra])
    if len(means) < 2:
        raise ValueError("need at least 2 realizations for a standard error")
    return float(means.mean()), float(means.std(ddof=1) / math.sqrt(len(means)))


def unfold(
    spectrum,
    fit_degree: int = DEFAULT_UNFOLD_DEGREE,
    keep_fraction: float = UNFOLD_KEEP_FRACTION,
) -> np.ndarray:
    """Map a spectrum so its mean level density is unity.

    Fits a degree-``fit_degree`` polynomial to the cumulative staircase on the
    central ``keep_fraction`` of levels and returns the transformed central
    levels.  Raises NumericError if the fitted map is not increasing on the
    retained window (raise the degree or trim harder).
    """
    eigs = _as_eigenvalues(spectrum)
    if len(eigs) < 50:
        raise ValueError(f"need at least 50 levels to unfold, got {len(eigs)}")
    if fit_degree < 3:
        raise ValueError(f"fit degree must be >= 3, got {fit_degree}")
    cut = int(round((1.0 - keep_fraction) / 2.0 * len(eigs)))
    window = eigs[cut : len(eigs) - cut]
    counts = np.arange(cut, len(eigs) - cut) + 0.5
    poly = np.polynomial.Polynomial.fit(window, counts, deg=fit_degree)
    unfolded = poly(window)
    if np.any(np.diff(unfolded) <= 0):
        raise NumericError(
            f"unfolding map of degree {fit_degree} is non-monotone on the "
            f"retained window ({len(window)} levels); raise the degree or trim"
        )
    return unfolded


def wigner_surmise(ensemble: EnsembleClass, s):
    """Nearest-neighbor spacing density at unit mean spacing.

    The Poisson entry e^{-s} is included as a diagnostic reference.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("spacings must be nonnegative")
    if ensemble is EnsembleClass.GOE:
        out = (math.pi / 2.0) * s * np.exp(-math.pi * s**2 / 4.0)
    elif ensemble is EnsembleClass.GUE:
        out = (32.0 / math.pi**2) * s**2 * np.exp(-4.0 * s**2 / math.pi)
    elif ensemble is EnsembleClass.GSE:
        out = (2**18 / (3**6 * math.pi**3)) * s**4 * np.exp(
            -64.0 * s**2 / (9.0 * math.pi)
        )
    elif ensemble is EnsembleClass.POISSON:
        out = np.exp(-s)
    else:  # pragma: no cover
        raise ValueError(f"unknown ensemble {ensemble}")
    return out if out.ndim else float(out)


def predict_ensemble(L: int, k: int, all_terms_real: bool = False) -> EnsembleClass:
    """Symmetry-based prediction from the parities of L and k.

    Hamiltonians whose matrix is purely real in the computational basis
    (``all_terms_real``) commute with plain conjugation and sit in the GOE
    regardless of parity.  Otherwise: odd k lacks time-reversal symmetry
    (GUE); even k is time-reversal invariant and splits by the sign of T^2
    into GOE (even L) and GSE (odd L).
    """
    if not 1 <= k <= L:
        raise ValueError(f"need 1 <= k <= L, got k={k}, L={L}")
    if all_terms_real:
        return EnsembleClass.GOE
    if k % 2 == 1:
        return EnsembleClass.GUE
    return EnsembleClass.GOE if L % 2 == 0 else EnsembleClass.GSE


class Classification(NamedTuple):
    label: EnsembleClass
    distance: float


def classify_empirical(mean_r: float) -> Classification:
    """Nearest reference ensemble for a measured mean gap ratio."""
    if not 0.0 < mean_r < 1.0:
        raise ValueError(f"mean_r must lie in (0, 1), got {mean_r}")
    label = min(_REFERENCE_MEAN_R, key=lambda c: abs(_REFERENCE_MEAN_R[c] - mean_r))
    return Classification(label, abs(_REFERENCE_MEAN_R[label] - mean_r))


_MINUS_I_SIGMA_Y = np.array([[0.0, -1.0], [1.0, 0.0]])


@lru_cache(maxsize=None)
def _spin_flip_unitary(L: int) -> np.ndarray:
    # U_T = (-i sigma_y)^{tensor L}; real orthogonal, U_T^2 = (-1)^L.
    out = np.array([[1.0]])
    for _ in range(L):
        out = np.kron(out, _MINUS_I_SIGMA_Y)
    return out


class TimeReversalRelation(NamedTuple):
    relation: str  # "commutes" | "anticommutes" | "neither"
    t_squared_sign: int


def time_reversal_relation(
    matrix: np.ndarray, L: int, tol: float = 1e-10
) -> TimeReversalRelation:
    """Evaluate T H T^-1 against +-H for T = U_T K, U_T = (-i sigma_y)^(x L).

    Also reports the sign of T^2 = U_T U_T^*, computed directly.
    """
    matrix = np.asarray(matrix)
    dim = 1 << L
    if matrix.shape != (dim, dim):
        raise ValueError(f"matrix shape {matrix.shape} does not match 2^{L}")
    u = _spin_flip_unitary(L)
    transformed = u @ matrix.conj() @ u.T
    scale = max(np.abs(matrix).max(), 1e-300)
    if np.abs(transformed - matrix).max() <= tol * scale:
        relation = "commutes"
    elif np.abs(transformed + matrix).max() <= tol * scale:
        relation = "anticommutes"
    else:
        relation = "neither"
    t_squared = u @ u  # U_T real, so U_T U_T^* = U_T^2
    sign = 1 if t_squared[0, 0] > 0 else -1
    eye = np.eye(dim)
    if np.abs(t_squared - sign * eye).max() > tol:
        raise NumericError("T^2 is not proportional to the identity")
    return TimeReversalRelation(relation, sign)


# Takagi-type factor for one site pair: W2 W2^T equals the pair block of U_T,
# so W = W2^{tensor L/2} turns any T-commuting H (even L) into a real matrix.
_Q2 = np.array(
    [
        [1.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 1.0],
        [0.0, -1.0, 0.0, 1.0],
        [1.0, 0.0, -1.0, 0.0],
    ]
) / math.sqrt(2.0)
_W2 = _Q2 * np.array([1.0, 1.0, 1.0j, 1.0j])


def _apply_pair_factor(matrix: np.ndarray, factor: np.ndarray, pair: int, side: str):
    n = matrix.shape[0]
    lead = 4**pair
    if side == "rows":
        shaped = matrix.reshape(lead, 4, n // (4 * lead), n)
        shaped = np.einsum("ab,pbqn->paqn", factor, shaped)
    else:
        shaped = matrix.reshape(n, lead, 4, n // (4 * lead))
        shaped = np.einsum("npbq,ba->npaq", shaped, factor)
    return shaped.reshape(n, n)


def to_real_basis(matrix: np.ndarray, L: int, tol: float = 1e-10) -> np.ndarray:
    """Rotate a T-commuting Hamiltonian (even L) into a manifestly real basis.

    Applies the pairwise tensor factors of W with O(L 4^L) work instead of a
    dense similarity transform.  Raises NumericError if the result is not
    real to ``tol`` (relative), which signals a non-T-commuting input.
    """
    if L % 2 != 0:
        raise ValueError("the real rotation exists only for even L")
    matrix = np.asarray(matrix, dtype=complex)
    dim = 1 << L
    if matrix.shape != (dim, dim):
        raise ValueError(f"matrix shape {matrix.shape} does not match 2^{L}")
    out = matrix
    w_dag = _W2.conj().T
    for pair in range(L // 2):
        out = _apply_pair_factor(out, w_dag, pair, "rows")
    for pair in range(L // 2):
        out = _apply_pair_factor(out, _W2, pair, "cols")
    scale = max(np.abs(matrix).max(), 1e-300)
    imag_max = np.abs(out.imag).max()
    if imag_max > tol * scale:
        raise NumericError(
            f"rotated matrix is not real (max imag {imag_max:.3e} vs scale "
            f"{scale:.3e}); the input does not commute with time reversal"
        )
    return np.ascontiguousarray(out.real)


__all__ = [
    "Classification",
    "DEFAULT_EDGE_TRIM",
    "EnsembleClass",
    "LevelStatistics",
    "TimeReversalRelation",
    "classify_empirical",
    "gap_ratios",
    "level_statistics",
    "mean_gap_ratio",
    "predict_ensemble",
    "time_reversal_relation",
    "to_real_basis",
    "trim_edges",
    "unfold",
    "wigner_surmise",
]
