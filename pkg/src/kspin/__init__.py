"""kspin: a desk-scale laboratory for k-local all-to-all random spin
Hamiltonians.

The package builds the Gaussian ensemble H(mu, sigma^2) of Pauli strings
acting on exactly k of L spins, diagonalizes it exactly, and checks the
spectra against closed-form results: parity-based symmetry classification,
the binomial (Krawtchouk) disorder-free spectrum, the semicircle envelope,
the detached ground-state energy, critical-disorder estimates, gap scaling,
and entanglement diagnostics.
"""

from ._version import __version__
from .ensemble import (
    CouplingSet,
    Decomposition,
    EnsembleParams,
    build_hamiltonian,
    decompose,
    deterministic_hamiltonian,
    export_couplings,
    import_couplings,
    sample_couplings,
    standard_normal_stream,
)
from .entanglement import (
    EntropyProfile,
    eigenstate_entropy_profile,
    entanglement_entropy,
    page_value,
    reduced_density_matrix,
    von_neumann_entropy,
)
from .errors import DataError, KspinError, NumericError, ResourceError
from .experiments import ScanConfig, ScanResult, run
from .pauli import (
    KLocalBasis,
    PauliTerm,
    apply_pauli,
    enumerate_k_local_terms,
    pauli_matrix,
    trace_inner_product,
)
from .rmt import (
    Classification,
    EnsembleClass,
    classify_empirical,
    gap_ratios,
    mean_gap_ratio,
    predict_ensemble,
    time_reversal_relation,
    to_real_basis,
    unfold,
    wigner_surmise,
)
from .spectral import (
    Spectrum,
    degeneracy_sector,
    detect_degeneracies,
    eigendecompose,
    spectral_symmetry_defect,
)
from .theory import (
    B_sum,
    DisorderFreeSpectrum,
    ProductEigenstate,
    critical_disorder_closed_form,
    critical_disorder_exact,
    disorder_free_spectrum,
    generating_function_eigenvalue,
    krawtchouk_eigenvalue,
    outlier_energy,
    predicted_gap,
    product_eigenstate,
    semicircle_density,
    semicircle_radius,
    sigma_s_estimate,
)
