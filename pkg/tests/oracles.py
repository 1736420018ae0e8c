"""Independent brute-force oracles used to freeze expected test values.

Everything here is deliberately naive: explicit Kronecker products, explicit
polynomial expansion, explicit summation.  None of it shares code with the
package paths it checks.
"""

from __future__ import annotations

import numpy as np

PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


def kron_matrix(term, num_sites: int) -> np.ndarray:
    """Dense matrix of a Pauli string by explicit Kronecker products."""
    placed = dict(zip(term.sites, term.axes))
    out = np.array([[1.0 + 0.0j]])
    for site in range(num_sites):
        out = np.kron(out, PAULI[placed.get(site, "i")])
    return out


def kron_sum(terms, coefficients, num_sites: int) -> np.ndarray:
    """Sum of coefficient-weighted Pauli strings, one Kronecker build each."""
    dim = 2**num_sites
    out = np.zeros((dim, dim), dtype=complex)
    for coeff, term in zip(coefficients, terms):
        out += coeff * kron_matrix(term, num_sites)
    return out


def semicircle_samples(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    """Draw from the semicircular density via its Beta(3/2, 3/2) representation."""
    return radius * (2.0 * rng.beta(1.5, 1.5, size=n) - 1.0)
