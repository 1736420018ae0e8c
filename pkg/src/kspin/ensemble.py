"""The random ensemble H(mu, sigma^2) of k-local all-to-all Hamiltonians.

Each of the 3^k * C(L,k) Pauli strings carries an independent Gaussian
coupling with

    mean J  = mu * f(L) / (sqrt(3^k) * C(L,k))
    var  J  = sigma^2 * f(L)^2 / (3^k * C(L,k))

where f(L) = L ("extensive" mode, the default) keeps the total energy
extensive, and f(L) = 1 ("constant" mode) turns that rescaling off.

Reproducibility contract
------------------------
Couplings for realization ``r`` come from a Philox4x64 counter-based
generator keyed by ``(master_seed mod 2^64, r)``.  The raw 64-bit words are
mapped to uniforms ``u = ((w >> 11) + 0.5) * 2^-53`` (strictly inside (0,1))
and through the inverse normal CDF; coupling ``i`` consumes word ``i`` of the
stream.  Realizations are therefore independent, order-insensitive, and
identical no matter how work is scheduled across processes.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.random import Generator, Philox
from scipy.special import ndtri

from .pauli import AXES, KLocalBasis, get_basis

F_MODES = ("extensive", "constant")


@dataclass(frozen=True)
class EnsembleParams:
    """Parameters (L, k, mu, sigma, f mode, master seed) defining H(mu, sigma^2)."""

    L: int
    k: int
    mu: float
    sigma: float
    f_mode: str = "extensive"
    master_seed: int = 0

    def __post_init__(self):
        if not 1 <= self.k <= self.L:
            raise ValueError(f"need 1 <= k <= L, got k={self.k}, L={self.L}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")
        if self.f_mode not in F_MODES:
            raise ValueError(f"f_mode must be one of {F_MODES}, got {self.f_mode!r}")

    @property
    def f(self) -> float:
        """Energy-scale factor f(L)."""
        return float(self.L) if self.f_mode == "extensive" else 1.0

    @property
    def n_subsets(self) -> int:
        return math.comb(self.L, self.k)

    @property
    def n_couplings(self) -> int:
        return 3**self.k * self.n_subsets

    @property
    def coupling_mean(self) -> float:
        return self.mu * self.f / (math.sqrt(3**self.k) * self.n_subsets)

    @property
    def coupling_std(self) -> float:
        return self.sigma * self.f / math.sqrt(3**self.k * self.n_subsets)

    def with_(self, **changes) -> "EnsembleParams":
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class CouplingSet:
    """One realization of the coupling vector, index-aligned with the term basis."""

    values: np.ndarray
    realization_index: int


def standard_normal_stream(master_seed: int, realization_index: int, n: int) -> np.ndarray:
    """The package's fixed N(0,1) stream for (master_seed, realization_index)."""
    if realization_index < 0:
        raise ValueError("realization_index must be nonnegative")
    key = np.array(
        [master_seed % (1 << 64), realization_index % (1 << 64)], dtype=np.uint64
    )
    bits = Generator(Philox(key=key)).integers(
        0, 1 << 64, size=n, dtype=np.uint64, endpoint=False
    )
    uniforms = ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    return ndtri(uniforms)


def sample_couplings(params: EnsembleParams, realization_index: int) -> CouplingSet:
    """Draw the coupling vector of one disorder realization."""
    normals = standard_normal_stream(
        params.master_seed, realization_index, params.n_couplings
    )
    values = params.coupling_mean + params.coupling_std * normals
    return CouplingSet(values=values, realization_index=realization_index)


def build_hamiltonian(
    params: EnsembleParams, couplings: CouplingSet, max_sites: int | None = None
) -> np.ndarray:
    """Dense Hermitian H = sum_a J_a P_a over the ordered k-local basis."""
    basis = get_basis(params.L, params.k)
    if np.shape(couplings.values) != (len(basis),):
        raise ValueError(
            f"coupling vector has shape {np.shape(couplings.values)}, "
            f"expected ({len(basis)},)"
        )
    if max_sites is None:
        return basis.to_dense(couplings.values)
    return basis.to_dense(couplings.values, max_sites=max_sites)


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Split of H(mu, sigma^2) into a deterministic and a disordered part.

    ``prefactor_deterministic * deterministic + prefactor_disordered *
    disordered`` equals the Hamiltonian built from
    ``sample_couplings(params, realization_index)`` up to float re-association,
    because both use the identical normal draws.
    """

    params: EnsembleParams
    realization_index: int
    prefactor_deterministic: float
    prefactor_disordered: float
    deterministic: np.ndarray  # all couplings equal to one
    disordered: np.ndarray  # standard-normal couplings

    def assemble(self, sigma: float | None = None, mu: float | None = None) -> np.ndarray:
        """Rebuild H for possibly overridden (mu, sigma) at fixed draws."""
        p = self.params
        if sigma is not None or mu is not None:
            p = p.with_(
                sigma=p.sigma if sigma is None else sigma,
                mu=p.mu if mu is None else mu,
            )
        pref_det = p.mu * p.f / (math.sqrt(3**p.k) * p.n_subsets)
        pref_dis = p.sigma * p.f / math.sqrt(3**p.k * p.n_subsets)
        return pref_det * self.deterministic + pref_dis * self.disordered


def decompose(params: EnsembleParams, realization_index: int = 0) -> Decomposition:
    """Build the deterministic/disordered parts sharing one normal stream."""
    basis = get_basis(params.L, params.k)
    normals = standard_normal_stream(
        params.master_seed, realization_index, params.n_couplings
    )
    return Decomposition(
        params=params,
        realization_index=realization_index,
        prefactor_deterministic=params.mu
        * params.f
        / (math.sqrt(3**params.k) * params.n_subsets),
        prefactor_disordered=params.sigma
        * params.f
        / math.sqrt(3**params.k * params.n_subsets),
        deterministic=basis.to_dense(np.ones(len(basis))),
        disordered=basis.to_dense(normals),
    )


def deterministic_hamiltonian(
    L: int, k: int, mu: float, f_mode: str = "extensive"
) -> np.ndarray:
    """Dense H(mu, 0): every coupling at its mean value."""
    params = EnsembleParams(L=L, k=k, mu=mu, sigma=0.0, f_mode=f_mode)
    basis = get_basis(L, k)
    return basis.to_dense(np.full(len(basis), params.coupling_mean))


def export_couplings(path, params: EnsembleParams, couplings: CouplingSet) -> None:
    """Write a coupling vector as CSV (coupling_index, sites, axes, value)."""
    basis = get_basis(params.L, params.k)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["coupling_index", "sites", "axes", "value"])
        for i, (term, value) in enumerate(zip(basis.terms, couplings.values)):
            writer.writerow(
                [
                    i,
                    ";".join(str(s) for s in term.sites),
                    "".join(term.axes),
                    repr(float(value)),
                ]
            )


def import_couplings(path, params: EnsembleParams) -> CouplingSet:
    """Read a coupling CSV back, checking index alignment with the term basis."""
    basis = get_basis(params.L, params.k)
    values = np.empty(len(basis))
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        count = 0
        for row in reader:
            i = int(row["coupling_index"])
            term = basis.terms[i]
            sites = tuple(int(s) for s in row["sites"].split(";"))
            axes = tuple(row["axes"])
            if sites != term.sites or axes != term.axes:
                raise ValueError(
                    f"row {i} labels term {sites}/{axes}, expected "
                    f"{term.sites}/{term.axes}"
                )
            values[i] = float(row["value"])
            count += 1
    if count != len(basis):
        raise ValueError(f"expected {len(basis)} rows, read {count}")
    return CouplingSet(values=values, realization_index=-1)


__all__ = [
    "AXES",
    "CouplingSet",
    "Decomposition",
    "EnsembleParams",
    "F_MODES",
    "KLocalBasis",
    "build_hamiltonian",
    "decompose",
    "deterministic_hamiltonian",
    "export_couplings",
    "import_couplings",
    "sample_couplings",
    "standard_normal_stream",
]
