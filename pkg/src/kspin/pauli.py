"""k-local Pauli strings as dense matrices or matrix-free kernels.

Conventions, fixed so that runs are bit-for-bit comparable:

* Computational basis states are ordered by the integer value of their bit
  string, with site 0 as the most significant bit.
* Terms enumerate lexicographically in (sites, axes) with axis order
  x < y < z, so a term's position in the enumeration is a stable index.
* Operator phases live in {1, i, -1, -i} and are tracked exactly; no
  floating-point multiplication enters the construction of a single string.

A string with axes a_1..a_k on sites j_1..j_k acts on a basis state |b> as

    P |b> = i^{n_y} (-1)^{popcount(b & phase_mask)} |b ^ flip_mask>

where ``flip_mask`` collects the x/y sites, ``phase_mask`` the y/z sites and
``n_y`` counts the y factors.  All kernels below are pure functions of their
inputs and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product

import numpy as np

from .errors import ResourceError

AXES = ("x", "y", "z")

#: Largest L for which dense 2^L x 2^L operators are allocated by default.
MAX_DENSE_SITES = 14

_I_POWERS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)

SINGLE_SITE = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


@dataclass(frozen=True)
class PauliTerm:
    """A Pauli string acting nontrivially on exactly ``len(sites)`` spins.

    Attributes
    ----------
    sites : tuple of int
        Strictly increasing site indices.
    axes : tuple of str
        One of "x", "y", "z" per site.
    """

    sites: tuple[int, ...]
    axes: tuple[str, ...]

    def __post_init__(self):
        if len(self.sites) == 0:
            raise ValueError("a Pauli term must touch at least one site")
        if len(self.sites) != len(self.axes):
            raise ValueError("sites and axes must have equal length")
        if any(a not in AXES for a in self.axes):
            raise ValueError(f"axes must be drawn from {AXES}, got {self.axes}")
        if self.sites[0] < 0 or any(
            b <= a for a, b in zip(self.sites, self.sites[1:])
        ):
            raise ValueError("sites must be strictly increasing and nonnegative")

    @property
    def weight(self) -> int:
        return len(self.sites)

    def validate_for(self, num_sites: int) -> None:
        if self.sites[-1] >= num_sites:
            raise ValueError(
                f"term touches site {self.sites[-1]} but only {num_sites} sites exist"
            )


def site_bit(site: int, num_sites: int) -> int:
    """Bit value of ``site`` in the basis-state integer (site 0 = MSB)."""
    return 1 << (num_sites - 1 - site)


def term_masks(term: PauliTerm, num_sites: int) -> tuple[int, int, complex]:
    """Return (flip_mask, phase_mask, i**n_y) for the kernel form of ``term``."""
    flip = 0
    phase = 0
    n_y = 0
    for site, axis in zip(term.sites, term.axes):
        bit = site_bit(site, num_sites)
        if axis != "z":
            flip |= bit
        if axis != "x":
            phase |= bit
        if axis == "y":
            n_y += 1
    return flip, phase, _I_POWERS[n_y % 4]


@lru_cache(maxsize=None)
def _parity_table(num_sites: int) -> np.ndarray:
    """popcount parity of every integer below 2**num_sites, as int8 0/1."""
    values = np.arange(1 << num_sites, dtype=np.uint64)
    return (np.bitwise_count(values) & np.uint64(1)).astype(np.int8)


def enumerate_k_local_terms(num_sites: int, k: int) -> list[PauliTerm]:
    """All C(L,k) * 3^k Pauli strings on exactly k of L sites.

    The list is ordered lexicographically in (sites, axes); this ordering is
    the coupling-index convention used throughout the package.
    """
    if not 1 <= k <= num_sites:
        raise ValueError(f"need 1 <= k <= L, got k={k}, L={num_sites}")
    return [
        PauliTerm(sites, axes)
        for sites in combinations(range(num_sites), k)
        for axes in product(AXES, repeat=k)
    ]


def _check_dense_budget(num_sites: int, max_sites: int) -> None:
    if num_sites > max_sites:
        raise ResourceError(
            f"dense 2^{num_sites} x 2^{num_sites} operator exceeds the budget "
            f"(max L = {max_sites})"
        )


def pauli_matrix(
    term: PauliTerm, num_sites: int, max_sites: int = MAX_DENSE_SITES
) -> np.ndarray:
    """Dense 2^L x 2^L matrix of a Pauli string.

    The result is Hermitian, traceless and squares to the identity.
    """
    term.validate_for(num_sites)
    _check_dense_budget(num_sites, max_sites)
    flip, pm, phase = term_masks(term, num_sites)
    dim = 1 << num_sites
    cols = np.arange(dim)
    signs = 1.0 - 2.0 * _parity_table(num_sites)[cols & pm]
    out = np.zeros((dim, dim), dtype=complex)
    out[cols ^ flip, cols] = phase * signs
    return out


def apply_pauli(term: PauliTerm, state: np.ndarray) -> np.ndarray:
    """Apply a Pauli string to a state vector without forming the matrix.

    Exact up to the sign/i phase factors; no rounding beyond them.
    """
    state = np.asarray(state)
    if state.ndim != 1:
        raise ValueError("state must be a 1-D vector")
    dim = state.shape[0]
    num_sites = dim.bit_length() - 1
    if dim != 1 << num_sites:
        raise ValueError(f"state length {dim} is not a power of two")
    term.validate_for(num_sites)
    flip, pm, phase = term_masks(term, num_sites)
    idx = np.arange(dim)
    out = np.empty(dim, dtype=np.promote_types(state.dtype, np.complex128))
    out[idx ^ flip] = (phase * (1.0 - 2.0 * _parity_table(num_sites)[idx & pm])) * state
    return out


def trace_inner_product(a: PauliTerm, b: PauliTerm, num_sites: int) -> int:
    """Tr[P_a P_b], evaluated combinatorially: 2^L if a == b else 0."""
    a.validate_for(num_sites)
    b.validate_for(num_sites)
    return (1 << num_sites) if a == b else 0


def _walsh_transform(values: np.ndarray) -> np.ndarray:
    # Unnormalized transform: out[b] = sum_m (-1)^popcount(b & m) values[m].
    out = values.copy()
    dim = out.shape[0]
    half = 1
    while half < dim:
        out = out.reshape(-1, 2, half)
        upper = out[:, 0, :] + out[:, 1, :]
        lower = out[:, 0, :] - out[:, 1, :]
        out[:, 0, :] = upper
        out[:, 1, :] = lower
        half *= 2
    return out.reshape(dim)


class KLocalBasis:
    """The ordered k-local term basis for (L, k), with precomputed bit masks.

    Dense assembly groups terms by flip mask: within a group the column
    coefficients of sum_a J_a P_a are a Walsh transform of the couplings
    scattered by phase mask, so the cost per group is near 2^L instead of
    2^L per term.  Within one flip group the phase masks are distinct, which
    makes the scatter collision-free.
    """

    def __init__(self, num_sites: int, k: int):
        self.num_sites = num_sites
        self.k = k
        self.terms = enumerate_k_local_terms(num_sites, k)
        flips = np.empty(len(self.terms), dtype=np.int64)
        phase_masks = np.empty(len(self.terms), dtype=np.int64)
        phases = np.empty(len(self.terms), dtype=complex)
        for i, term in enumerate(self.terms):
            flips[i], phase_masks[i], phases[i] = term_masks(term, num_sites)
        self._groups = []
        order = np.argsort(flips, kind="stable")
        flips_sorted = flips[order]
        boundaries = np.flatnonzero(np.diff(flips_sorted)) + 1
        for chunk in np.split(order, boundaries):
            self._groups.append(
                (int(flips[chunk[0]]), chunk, phase_masks[chunk], phases[chunk])
            )

    def __len__(self) -> int:
        return len(self.terms)

    def to_dense(
        self, coefficients: np.ndarray, max_sites: int = MAX_DENSE_SITES
    ) -> np.ndarray:
        """Dense Hermitian matrix of sum_a coefficients[a] * P_a."""
        coefficients = np.asarray(coefficients, dtype=float)
        if coefficients.shape != (len(self.terms),):
            raise ValueError(
                f"expected {len(self.terms)} coefficients, got {coefficients.shape}"
            )
        _check_dense_budget(self.num_sites, max_sites)
        dim = 1 << self.num_sites
        cols = np.arange(dim)
        parity = _parity_table(self.num_sites)
        out = np.zeros((dim, dim), dtype=complex)
        for flip, idx, masks, phases in self._groups:
            weights = coefficients[idx] * phases
            if idx.size <= self.num_sites:
                # Few terms: direct sign accumulation beats a full transform.
                signs = 1.0 - 2.0 * parity[cols[None, :] & masks[:, None]]
                column_values = weights @ signs
            else:
                scattered = np.zeros(dim, dtype=complex)
                scattered[masks] = weights
                column_values = _walsh_transform(scattered)
            out[cols ^ flip, cols] += column_values
        return out


@lru_cache(maxsize=32)
def get_basis(num_sites: int, k: int) -> KLocalBasis:
    """Process-wide cache of term bases; construction is deterministic."""
    return KLocalBasis(num_sites, k)
