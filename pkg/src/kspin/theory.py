"""Closed-form spectral machinery for the k-local ensemble.

Contents:

* the disorder-free spectrum: binomial-weighted levels given by an
  alternating binomial sum (a Krawtchouk polynomial evaluation), plus the
  exact product eigenstates;
* an independent generating-function oracle for the same eigenvalues;
* the semicircle envelope of the disordered bulk, the detached ground-state
  (outlier) energy, critical-disorder solvers, and the predicted gap.

All binomial/Krawtchouk arithmetic is carried out in exact integer/rational
form and converted to float once at the end; the alternating sums suffer
catastrophic cancellation in floating point already near L = 14.

Sign-label convention: the single-site states |u_s> carry the eigenvalue
s = +-1 of (sigma_x + sigma_y + sigma_z)/sqrt(3), and the level index n of a
product state counts its minus labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .ensemble import EnsembleParams
from .errors import NumericError

#: Bisection bracket for critical-disorder root finding, in units of |mu|.
_SIGMA_BRACKET_FACTOR = 4.0
_BISECTION_TOL = 1e-10
#: Largest acceptable relative mismatch for the tangency fallback of
#: sigma_s_estimate when the quadratic discriminant turns (slightly) negative.
_TANGENCY_RTOL = 0.05

_SQRT3 = math.sqrt(3.0)
_PHASE = np.exp(0.25j * np.pi)

# Single-site eigenvectors of (sigma_x + sigma_y + sigma_z)/sqrt(3), labelled
# by their eigenvalue +-1.
_U_SITE = {
    +1: np.array(
        [math.sqrt(1.0 + 1.0 / _SQRT3), _PHASE * math.sqrt(1.0 - 1.0 / _SQRT3)]
    )
    / math.sqrt(2.0),
    -1: np.array(
        [math.sqrt(1.0 - 1.0 / _SQRT3), -_PHASE * math.sqrt(1.0 + 1.0 / _SQRT3)]
    )
    / math.sqrt(2.0),
}


def _f_value(L: int, f_mode: str) -> float:
    if f_mode == "extensive":
        return float(L)
    if f_mode == "constant":
        return 1.0
    raise ValueError(f"unknown f_mode {f_mode!r}")


def _check_lk(L: int, k: int) -> None:
    if not 1 <= k <= L:
        raise ValueError(f"need 1 <= k <= L, got k={k}, L={L}")


def krawtchouk_number(L: int, k: int, n: int) -> int:
    """Exact integer K(n) = sum_j (-1)^j C(n,j) C(L-n,k-j)."""
    _check_lk(L, k)
    if not 0 <= n <= L:
        raise ValueError(f"need 0 <= n <= L, got n={n}, L={L}")
    return sum(
        (-1) ** j * math.comb(n, j) * math.comb(L - n, k - j) for j in range(k + 1)
    )


def krawtchouk_eigenvalue(
    L: int, k: int, n: int, mu: float, f_mode: str = "extensive"
) -> float:
    """Level n of the disorder-free Hamiltonian: mu * f(L) * K(n) / C(L,k)."""
    ratio = Fraction(krawtchouk_number(L, k, n), math.comb(L, k))
    return mu * _f_value(L, f_mode) * float(ratio)


def generating_function_eigenvalue(
    L: int, k: int, n_minus: int, mu: float = 1.0, f_mode: str = "extensive"
) -> float:
    """Coefficient oracle: extract t^k from (1+t)^(L-n)(1-t)^n, scaled like
    ``krawtchouk_eigenvalue``.

    This expands the polynomial product explicitly and is deliberately
    independent of the alternating-sum route.
    """
    _check_lk(L, k)
    if not 0 <= n_minus <= L:
        raise ValueError(f"need 0 <= n_minus <= L, got {n_minus}")
    plus = [math.comb(L - n_minus, j) for j in range(L - n_minus + 1)]
    minus = [(-1) ** j * math.comb(n_minus, j) for j in range(n_minus + 1)]
    coeff = 0
    for i, a in enumerate(plus):
        j = k - i
        if 0 <= j < len(minus):
            coeff += a * minus[j]
    return mu * _f_value(L, f_mode) * float(Fraction(coeff, math.comb(L, k)))


@dataclass(frozen=True)
class DisorderFreeLevel:
    n: int
    energy: float
    degeneracy: int


@dataclass(frozen=True)
class DisorderFreeSpectrum:
    """The complete disorder-free level multiset: L+1 levels, degeneracy C(L,n)."""

    L: int
    k: int
    mu: float
    levels: tuple[DisorderFreeLevel, ...]

    def as_multiset(self) -> np.ndarray:
        """All 2^L eigenvalues with degeneracies expanded, sorted ascending."""
        values = np.concatenate(
            [np.full(level.degeneracy, level.energy) for level in self.levels]
        )
        return np.sort(values)


def disorder_free_spectrum(
    L: int, k: int, mu: float, f_mode: str = "extensive"
) -> DisorderFreeSpectrum:
    levels = tuple(
        DisorderFreeLevel(
            n=n,
            energy=krawtchouk_eigenvalue(L, k, n, mu, f_mode),
            degeneracy=math.comb(L, n),
        )
        for n in range(L + 1)
    )
    return DisorderFreeSpectrum(L=L, k=k, mu=mu, levels=levels)


@dataclass(frozen=True, eq=False)
class ProductEigenstate:
    """Product eigenstate |u_{s_1}> x ... x |u_{s_L}> of the disorder-free part."""

    signs: tuple[int, ...]
    amplitudes: np.ndarray

    @property
    def n_minus(self) -> int:
        return self.signs.count(-1)


def _normalize_signs(s) -> tuple[int, ...]:
    if isinstance(s, str):
        table = {"+": 1, "-": -1}
        try:
            return tuple(table[c] for c in s)
        except KeyError:
            raise ValueError(f"sign string may contain only '+'/'-', got {s!r}")
    signs = tuple(int(x) for x in s)
    if any(x not in (1, -1) for x in signs):
        raise ValueError(f"signs must be +-1, got {signs}")
    return signs


def product_eigenstate(s) -> ProductEigenstate:
    """Build the product eigenstate for a sign string (site 0 first)."""
    signs = _normalize_signs(s)
    if not signs:
        raise ValueError("sign string must be nonempty")
    state = np.array([1.0 + 0.0j])
    for sign in signs:
        state = np.kron(state, _U_SITE[sign])
    return ProductEigenstate(signs=signs, amplitudes=state)


def semicircle_radius(params: EnsembleParams, sigma: float | None = None) -> float:
    """Bulk envelope radius R = 2 f(L) sqrt(sigma^2 + mu^2/C(L,k))."""
    s = params.sigma if sigma is None else sigma
    return 2.0 * params.f * math.sqrt(s * s + params.mu**2 / params.n_subsets)


def semicircle_density(energy, radius: float):
    """Semicircular density (2/(pi R^2)) sqrt(R^2 - E^2) on |E| < R, else 0."""
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    e = np.asarray(energy, dtype=float)
    inside = np.abs(e) < radius
    out = np.zeros_like(e)
    out[inside] = (2.0 / (math.pi * radius**2)) * np.sqrt(
        radius**2 - e[inside] ** 2
    )
    return out if out.ndim else float(out)


@lru_cache(maxsize=None)
def _level_sum(L: int, k: int) -> Fraction:
    # S = 2^-L * sum_n C(L,n) C / (C - K(n)) over levels with K(n) != C,
    # i.e. over every level except the ground value mu*f (n=0 always; n=L too
    # when k is even).  Dimensionless and exact.
    C = math.comb(L, k)
    total = Fraction(0)
    for n in range(L + 1):
        K = krawtchouk_number(L, k, n)
        if K == C:
            continue
        total += Fraction(math.comb(L, n) * C, C - K)
    return total / (1 << L)


def B_sum(L: int, k: int, mu: float, f_mode: str = "extensive") -> float:
    """B = 2^-L sum over non-ground levels of C(L,n)/(mu f - lambda_n)."""
    if mu == 0:
        raise ValueError("mu must be nonzero")
    return float(_level_sum(L, k)) / (mu * _f_value(L, f_mode))


def outlier_energy(params: EnsembleParams, sigma: float | None = None) -> float:
    """Detached ground-state energy lambda_min(sigma) = mu f + sigma^2 f^2 B.

    Requires mu < 0 (the ground-state branch).  For odd k the top outlier is
    the mirror image: lambda_max(sigma) = -lambda_min(sigma).
    """
    if params.mu >= 0:
        raise ValueError(
            "outlier_energy covers the ground-state branch mu < 0; for odd k "
            "use the spectral mirror symmetry instead"
        )
    s = params.sigma if sigma is None else sigma
    S = float(_level_sum(params.L, params.k))
    return params.mu * params.f + s * s * params.f * S / params.mu


def _edge_gap(params: EnsembleParams, s_level: float):
    # g(sigma) = s*sqrt(sigma^2 + mu^2/C) - |mu + sigma^2 S / mu|, the
    # f-independent difference between the s-std bulk edge and the outlier
    # magnitude (per site-energy unit f).
    m = abs(params.mu)
    S = float(_level_sum(params.L, params.k))
    inv_c = 1.0 / params.n_subsets

    def g(sigma: float) -> float:
        return s_level * math.sqrt(sigma * sigma + m * m * inv_c) - (
            m + sigma * sigma * S / m
        )

    return g, m, S, inv_c


def critical_disorder_exact(params: EnsembleParams) -> float:
    """Disorder at which the outlier meets the semicircle edge (s = 2).

    Solves 2 f sqrt(sigma^2 + mu^2/C) = |lambda_min(sigma)| for the smallest
    positive root by grid bracketing plus bisection to 1e-10 absolute.
    """
    if params.mu >= 0:
        raise ValueError("critical disorder is defined for mu < 0")
    g, m, _, _ = _edge_gap(params, 2.0)
    hi = _SIGMA_BRACKET_FACTOR * m
    grid = np.linspace(0.0, hi, 4097)
    values = [g(x) for x in grid]
    lo_idx = None
    for i in range(len(grid) - 1):
        if values[i] <= 0.0 < values[i + 1]:
            lo_idx = i
            break
    if lo_idx is None:
        best = int(np.argmax(values))
        raise NumericError(
            f"no sign change of edge-outlier gap on (0, {hi:g}]: "
            f"max g = {values[best]:.3e} at sigma = {grid[best]:.4f} "
            f"(L={params.L}, k={params.k}, mu={params.mu})"
        )
    lo, up = grid[lo_idx], grid[lo_idx + 1]
    while up - lo > _BISECTION_TOL:
        mid = 0.5 * (lo + up)
        if g(mid) <= 0.0:
            lo = mid
        else:
            up = mid
    return 0.5 * (lo + up)


def critical_disorder_closed_form(L: int, mu: float) -> float:
    """Large-L closed form at maximal binomial locality: |mu| sqrt(1 - 2/C(L, L//2))."""
    if mu >= 0:
        raise ValueError("critical disorder is defined for mu < 0")
    return abs(mu) * math.sqrt(1.0 - 2.0 / math.comb(L, L // 2))


def sigma_s_estimate(params: EnsembleParams, s_level: float) -> float:
    """Disorder at which the outlier enters the s-standard-deviation bulk band.

    Solves s f sqrt(sigma^2 + mu^2/C) = |mu f + sigma^2 f^2 B| through the
    quadratic in sigma^2 obtained by squaring; returns the smallest positive
    root (the first entry point).  When the discriminant is slightly negative
    the two branches have pinched into a near-tangency; the tangency point is
    returned provided the residual mismatch stays below
    ``_TANGENCY_RTOL`` relative, otherwise a NumericError is raised.
    """
    if params.mu >= 0:
        raise ValueError("sigma_s_estimate is defined for mu < 0")
    if s_level <= 0:
        raise ValueError("s_level must be positive")
    g, m, S, inv_c = _edge_gap(params, s_level)
    a = (S / m) ** 2
    b = 2.0 * S - s_level**2
    c = m * m * (1.0 - s_level**2 * inv_c)
    disc = b * b - 4.0 * a * c
    if disc >= 0.0:
        root = math.sqrt(disc)
        candidates = [x for x in ((-b - root) / (2 * a), (-b + root) / (2 * a)) if x > 0]
        if not candidates:
            raise NumericError(
                f"no positive root for s={s_level} (L={params.L}, k={params.k})"
            )
        return math.sqrt(min(candidates))
    vertex = -b / (2.0 * a)
    if vertex <= 0:
        raise NumericError(
            f"no admissible root for s={s_level} (L={params.L}, k={params.k}): "
            "negative discriminant and nonpositive vertex"
        )
    sigma_v = math.sqrt(vertex)
    mismatch = abs(g(sigma_v))
    scale = m + vertex * S / m
    if mismatch > _TANGENCY_RTOL * scale:
        raise NumericError(
            f"no admissible root for s={s_level} (L={params.L}, k={params.k}): "
            f"closest approach misses by {mismatch:.3e} (scale {scale:.3e})"
        )
    return sigma_v


def predicted_gap(params: EnsembleParams, sigma: float | None = None) -> float:
    """Analytic gap: distance from the lower bulk edge -R(sigma) to the outlier.

    Positive while the ground state is detached; crosses zero at the exact
    critical disorder.
    """
    if params.mu >= 0:
        raise ValueError("predicted_gap is defined for mu < 0")
    s = params.sigma if sigma is None else sigma
    lam = outlier_energy(params, s)
    return -semicircle_radius(params, s) - lam


__all__ = [
    "B_sum",
    "DisorderFreeLevel",
    "DisorderFreeSpectrum",
    "ProductEigenstate",
    "critical_disorder_closed_form",
    "critical_disorder_exact",
    "disorder_free_spectrum",
    "generating_function_eigenvalue",
    "krawtchouk_eigenvalue",
    "krawtchouk_number",
    "outlier_energy",
    "predicted_gap",
    "product_eigenstate",
    "semicircle_density",
    "semicircle_radius",
    "sigma_s_estimate",
]
