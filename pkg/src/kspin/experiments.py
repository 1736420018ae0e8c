"""Scan engine: disorder-averaged experiments, persistence, aggregation.

The unit of parallelism is one disorder realization.  Every task is a pure
function of (config, L, k, realization_index): it derives its own coupling
stream, builds its own matrices, and returns plain records.  Aggregation is a
deterministic ordered reduction, so results are identical for any worker
count.  Realizations that fail with a documented data/numeric error are
recorded with an error tag and excluded from aggregates.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from datetime import datetime, timezone
from functools import partial
from pathlib import Path

import numpy as np

from ._version import __version__
from .ensemble import EnsembleParams, build_hamiltonian, decompose, sample_couplings
from .entanglement import eigenstate_entropy_profile
from .errors import DataError, NumericError, ResourceError
from .rmt import (
    EnsembleClass,
    gap_ratios,
    predict_ensemble,
    to_real_basis,
    trim_edges,
    unfold,
    wigner_surmise,
)
from .spectral import degeneracy_sector, eigendecompose
from .theory import (
    critical_disorder_closed_form,
    critical_disorder_exact,
    outlier_energy,
    semicircle_radius,
    sigma_s_estimate,
)

EXPERIMENTS = (
    "level_stats",
    "spacing_hist",
    "spectrum_scan",
    "outlier_accuracy",
    "gap_scaling",
    "critical_band",
    "splitting",
)

DEFAULT_REALIZATIONS = {
    "level_stats": 100,
    "spacing_hist": 100,
    "spectrum_scan": 1,
    "outlier_accuracy": 64,
    "gap_scaling": 10,
    "critical_band": 10,
    "splitting": 16,
}

SCHEMAS = {
    "level_stats": ("L", "k", "realization", "mean_r", "status"),
    "spacing_hist": ("L", "k", "s_lo", "s_hi", "density", "surmise"),
    "spectrum_scan": (
        "L",
        "k",
        "realization",
        "sigma",
        "level_index",
        "energy",
        "entropy_norm",
        "envelope",
        "outlier",
    ),
    "outlier_accuracy": ("L", "k", "sigma", "mean_abs_diff", "sem"),
    "gap_scaling": ("L", "k", "sigma", "sigma_c", "delta_mean", "delta_sem"),
    "critical_band": (
        "L",
        "k",
        "realization",
        "sigma_c_emp",
        "sigma_2",
        "sigma_3",
        "status",
    ),
    "splitting": ("L", "k", "sigma", "realization", "splitting", "status"),
}

#: Levels used to estimate the bulk spacing just above the detached states.
MERGE_WINDOW = 8

#: Coarse scan points for the empirical merge locator, and the refinement
#: points placed around the coarse minimum.
MERGE_SCAN_POINTS = 24
MERGE_REFINE_POINTS = 8
#: The gap must rise by this factor past its minimum for the minimum to count
#: as a genuine merge point (guards against monotone, never-merging curves).
MERGE_RISE_FACTOR = 1.25


@dataclass(frozen=True)
class ScanConfig:
    """One experiment over a (L, k) grid with shared disorder settings."""

    experiment: str
    L_values: tuple[int, ...]
    k_values: tuple[int, ...]
    mu: float = 0.0
    sigma: float = 1.0
    sigma_grid: tuple[float, ...] | None = None
    realizations: int | None = None
    master_seed: int = 20240801
    f_mode: str = "extensive"
    out_dir: str | None = None
    threads: int = 1
    max_dense_l: int = 12
    max_vector_l: int = 11
    merge_factor: float = 2.0
    edge_trim: float = 0.05
    unfold_degree: int = 10
    hist_bins: int = 50
    hist_max: float = 4.0
    fit_window: tuple[float, float] = (0.2, 0.9)
    sigma_points: int = 10
    # Exponent fits only use sigma <= gap_fit_max * sigma_c: closer to the
    # critical point the discrete bulk edge sits a finite-size offset inside
    # the analytic edge and flattens the log-log slope.
    gap_fit_max: float = 0.6
    # Upper end of the merge scan, in units of |mu|.  All analytic estimates
    # put the transition at or below ~1.1|mu|; realizations whose gap has not
    # passed through a rising minimum by this point are recorded as
    # "merge not detected" rather than dragging the average into the
    # ill-defined slow-crossover tail.
    merge_scan_max: float = 1.5

    def validated(self) -> "ScanConfig":
        if self.experiment not in EXPERIMENTS:
            raise ValueError(
                f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}"
            )
        if not self.L_values or not self.k_values:
            raise ValueError("L_values and k_values must be nonempty")
        cfg = self
        if cfg.realizations is None:
            cfg = replace(cfg, realizations=DEFAULT_REALIZATIONS[cfg.experiment])
        if cfg.realizations < 1:
            raise ValueError("realizations must be >= 1")
        if max(cfg.L_values) > cfg.max_dense_l:
            raise ResourceError(
                f"L={max(cfg.L_values)} exceeds the dense cap "
                f"max_dense_l={cfg.max_dense_l}; refusing before allocation"
            )
        if cfg.experiment == "spectrum_scan" and max(cfg.L_values) > cfg.max_vector_l:
            raise ResourceError(
                f"eigenvectors at L={max(cfg.L_values)} exceed the cap "
                f"max_vector_l={cfg.max_vector_l}; refusing before allocation"
            )
        for L in cfg.L_values:
            for k in cfg.k_values:
                if not 1 <= k <= L:
                    raise ValueError(f"invalid grid cell k={k}, L={L}")
        if cfg.experiment in ("level_stats", "spacing_hist") and (
            cfg.mu != 0.0 or cfg.sigma != 1.0
        ):
            raise ValueError(
                f"{cfg.experiment} is defined for the fully disordered point "
                "mu=0, sigma=1"
            )
        if cfg.experiment in (
            "spectrum_scan",
            "outlier_accuracy",
            "gap_scaling",
            "critical_band",
            "splitting",
        ) and not cfg.mu < 0:
            raise ValueError(f"{cfg.experiment} requires mu < 0, got mu={cfg.mu}")
        return cfg

    def params(self, L: int, k: int, sigma: float | None = None) -> EnsembleParams:
        return EnsembleParams(
            L=L,
            k=k,
            mu=self.mu,
            sigma=self.sigma if sigma is None else sigma,
            f_mode=self.f_mode,
            master_seed=self.master_seed,
        )


@dataclass(eq=False)
class ScanResult:
    experiment: str
    rows: list[dict]
    aggregates: list[dict]
    manifest: dict


def _parallel_map(fn, tasks, threads: int) -> list:
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        chunk = max(1, math.ceil(len(tasks) / (threads * 4)))
        return list(pool.map(fn, tasks, chunksize=chunk))


def _grid_tasks(config: ScanConfig) -> list[tuple[int, int, int]]:
    return [
        (L, k, r)
        for L in config.L_values
        for k in config.k_values
        for r in range(config.realizations)
    ]


def _mean_sem(values: np.ndarray) -> tuple[float, float]:
    if len(values) == 0:
        return float("nan"), float("nan")
    if len(values) == 1:
        return float(values[0]), 0.0
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(len(values)))


def _eigenvalues(matrix: np.ndarray, L: int, k: int) -> np.ndarray:
    # Route time-reversal-commuting even-L matrices through the real solver.
    if predict_ensemble(L, k) is EnsembleClass.GOE:
        matrix = to_real_basis(matrix, L)
    return eigendecompose(matrix).eigenvalues


def _processed_spectrum(eigs: np.ndarray, L: int, k: int) -> np.ndarray:
    """Halve Kramers-degenerate spectra (odd L, even k) before statistics."""
    if predict_ensemble(L, k) is EnsembleClass.GSE:
        return degeneracy_sector(eigs).eigenvalues
    return eigs


def _n_ground_outliers(L: int, k: int) -> int:
    # For mu < 0 the detached ground level is twofold (n = 0 and n = L) when
    # k is even, simple when k is odd.  On Kramers-degenerate spectra (odd L,
    # even k) the twofold level collapses to one copy after sector halving,
    # which is always applied before counting.
    return 2 if (k % 2 == 0 and L % 2 == 0) else 1


def _outlier_bulk_gap(eigs: np.ndarray, L: int, k: int) -> float:
    m = _n_ground_outliers(L, k)
    return float(eigs[m] - eigs[m - 1])


def _is_merged(eigs: np.ndarray, L: int, k: int, merge_factor: float) -> bool:
    """Coarse merge guard: outlier-bulk gap below merge_factor x local spacing."""
    m = _n_ground_outliers(L, k)
    upper = min(m + MERGE_WINDOW, len(eigs) - 1)
    if upper <= m:
        raise DataError("spectrum too short for the merge criterion")
    gap = eigs[m] - eigs[m - 1]
    spacing = (eigs[upper] - eigs[m]) / (upper - m)
    return gap < merge_factor * spacing


# ---------------------------------------------------------------------------
# level statistics


def _level_stats_task(config: ScanConfig, task: tuple[int, int, int]) -> dict:
    L, k, r = task
    row = {"L": L, "k": k, "realization": r, "mean_r": None, "status": "ok"}
    try:
        params = config.params(L, k)
        matrix = build_hamiltonian(params, sample_couplings(params, r))
        eigs = _eigenvalues(matrix, L, k)
        eigs = _processed_spectrum(eigs, L, k)
        eigs = trim_edges(eigs, config.edge_trim)
        row["mean_r"] = float(gap_ratios(eigs).mean())
    except (DataError, NumericError) as exc:
        row["status"] = f"error: {exc}"
    return row


def level_statistics_experiment(config: ScanConfig) -> ScanResult:
    config = config.validated()
    rows = _parallel_map(
        partial(_level_stats_task, config), _grid_tasks(config), config.threads
    )
    aggregates = []
    for L in config.L_values:
        for k in config.k_values:
            values = np.array(
                [
                    row["mean_r"]
                    for row in rows
                    if row["L"] == L and row["k"] == k and row["status"] == "ok"
                ]
            )
            mean, sem = _mean_sem(values)
            predicted = predict_ensemble(L, k)
            aggregates.append(
                {
                    "L": L,
                    "k": k,
                    "mean_r": mean,
                    "sem": sem,
                    "n_ok": int(len(values)),
                    "predicted": predicted.value,
                    "reference": predicted.reference_mean_r,
                }
            )
    return ScanResult("level_stats", rows, aggregates, _manifest(config, rows))


# ---------------------------------------------------------------------------
# spacing distributions


def _spacing_task(config: ScanConfig, task: tuple[int, int, int]):
    L, k, r = task
    try:
        params = config.params(L, k)
        matrix = build_hamiltonian(params, sample_couplings(params, r))
        eigs = _eigenvalues(matrix, L, k)
        eigs = _processed_spectrum(eigs, L, k)
        unfolded = unfold(eigs, fit_degree=config.unfold_degree)
        return (L, k, np.diff(unfolded))
    except (DataError, NumericError, ValueError) as exc:
        raise NumericError(f"(L={L}, k={k}, realization={r}): {exc}") from exc


def spacing_distribution_experiment(config: ScanConfig) -> ScanResult:
    config = config.validated()
    results = _parallel_map(
        partial(_spacing_task, config), _grid_tasks(config), config.threads
    )
    edges = np.linspace(0.0, config.hist_max, config.hist_bins + 1)
    rows = []
    aggregates = []
    for L in config.L_values:
        for k in config.k_values:
            pooled = np.concatenate(
                [sp for (l, kk, sp) in results if l == L and kk == k]
            )
            density, _ = np.histogram(pooled, bins=edges, density=True)
            predicted = predict_ensemble(L, k)
            centers = 0.5 * (edges[:-1] + edges[1:])
            surmise = wigner_surmise(predicted, centers)
            for i in range(config.hist_bins):
                rows.append(
                    {
                        "L": L,
                        "k": k,
                        "s_lo": float(edges[i]),
                        "s_hi": float(edges[i + 1]),
                        "density": float(density[i]),
                        "surmise": float(surmise[i]),
                    }
                )
            chi2 = float(np.mean((density - surmise) ** 2))
            aggregates.append(
                {
                    "L": L,
                    "k": k,
                    "predicted": predicted.value,
                    "mean_spacing": float(pooled.mean()),
                    "mean_sq_deviation": chi2,
                    "n_spacings": int(len(pooled)),
                }
            )
    return ScanResult("spacing_hist", rows, aggregates, _manifest(config, rows))


# ---------------------------------------------------------------------------
# spectrum vs disorder (with entanglement color data)


def _spectrum_grid(config: ScanConfig) -> np.ndarray:
    if config.sigma_grid is not None:
        return np.asarray(config.sigma_grid, dtype=float)
    return np.linspace(0.0, 2.0 * abs(config.mu), 21)


def _spectrum_scan_task(config: ScanConfig, task: tuple[int, int, int]) -> list[dict]:
    L, k, r = task
    params = config.params(L, k)
    decomp = decompose(params, r)
    rows = []
    for sigma in _spectrum_grid(config):
        spec = eigendecompose(decomp.assemble(sigma=sigma), want_vectors=True)
        profile = eigenstate_entropy_profile(spec, L)
        envelope = semicircle_radius(params, sigma)
        outlier = outlier_energy(params, sigma)
        for idx in range(len(spec.eigenvalues)):
            rows.append(
                {
                    "L": L,
                    "k": k,
                    "realization": r,
                    "sigma": float(sigma),
                    "level_index": idx,
                    "energy": float(spec.eigenvalues[idx]),
                    "entropy_norm": float(profile.normalized[idx]),
                    "envelope": envelope,
                    "outlier": outlier,
                }
            )
    return rows


def spectrum_vs_disorder_scan(config: ScanConfig) -> ScanResult:
    config = config.validated()
    nested = _parallel_map(
        partial(_spectrum_scan_task, config), _grid_tasks(config), config.threads
    )
    rows = [row for chunk in nested for row in chunk]
    return ScanResult("spectrum_scan", rows, [], _manifest(config, rows))


# ---------------------------------------------------------------------------
# outlier-formula accuracy


def _sigma_c_reference(params: EnsembleParams) -> float:
    """Best-available critical-disorder scale for building sigma grids."""
    try:
        return critical_disorder_exact(params)
    except NumericError:
        try:
            return sigma_s_estimate(params, 2.0)
        except NumericError:
            return abs(params.mu)


def _outlier_grid(config: ScanConfig, params: EnsembleParams) -> np.ndarray:
    if config.sigma_grid is not None:
        return np.asarray(config.sigma_grid, dtype=float)
    return np.linspace(0.0, 0.8 * _sigma_c_reference(params), 9)


def _outlier_task(config: ScanConfig, task: tuple[int, int, int]):
    L, k, r = task
    params = config.params(L, k)
    decomp = decompose(params, r)
    grid = _outlier_grid(config, params)
    diffs = []
    merged_flags = []
    for sigma in grid:
        eigs = _eigenvalues(decomp.assemble(sigma=sigma), L, k)
        eigs = _processed_spectrum(eigs, L, k)
        diffs.append(abs(eigs[0] - outlier_energy(params, sigma)))
        merged_flags.append(_is_merged(eigs, L, k, config.merge_factor))
    return (L, k, grid, np.array(diffs), np.array(merged_flags))


def outlier_accuracy_experiment(config: ScanConfig) -> ScanResult:
    config = config.validated()
    results = _parallel_map(
        partial(_outlier_task, config), _grid_tasks(config), config.threads
    )
    rows = []
    aggregates = []
    for L in config.L_values:
        for k in config.k_values:
            cell = [res for res in results if res[0] == L and res[1] == k]
            grid = cell[0][2]
            diffs = np.stack([res[3] for res in cell])
            merged = np.stack([res[4] for res in cell])
            # Truncate once the ground state has merged for most realizations.
            keep = len(grid)
            for i in range(len(grid)):
                if merged[:, i].mean() > 0.5:
                    keep = i
                    break
            for i in range(keep):
                mean, sem = _mean_sem(diffs[:, i])
                rows.append(
                    {
                        "L": L,
                        "k": k,
                        "sigma": float(grid[i]),
                        "mean_abs_diff": mean,
                        "sem": sem,
                    }
                )
            aggregates.append(
                {"L": L, "k": k, "n_sigma_kept": keep, "n_sigma_total": len(grid)}
            )
    return ScanResult("outlier_accuracy", rows, aggregates, _manifest(config, rows))


# ---------------------------------------------------------------------------
# gap scaling


def _gap_grid(config: ScanConfig, L: int) -> tuple[float, np.ndarray]:
    sigma_c = critical_disorder_closed_form(L, config.mu)
    if config.sigma_grid is not None:
        return sigma_c, np.asarray(config.sigma_grid, dtype=float)
    lo, hi = config.fit_window
    return sigma_c, np.linspace(lo * sigma_c, hi * sigma_c, config.sigma_points)


def _gap_task(config: ScanConfig, task: tuple[int, int, int]):
    L, k, r = task
    params = config.params(L, k)
    decomp = decompose(params, r)
    _, grid = _gap_grid(config, L)
    deltas = []
    for sigma in grid:
        eigs = _eigenvalues(decomp.assemble(sigma=sigma), L, k)
        eigs = _processed_spectrum(eigs, L, k)
        deltas.append(_outlier_bulk_gap(eigs, L, k))
    return (L, k, np.array(deltas))


def gap_scaling_experiment(config: ScanConfig) -> ScanResult:
    config = config.validated()
    results = _parallel_map(
        partial(_gap_task, config), _grid_tasks(config), config.threads
    )
    rows = []
    aggregates = []
    for L in config.L_values:
        sigma_c, grid = _gap_grid(config, L)
        for k in config.k_values:
            deltas = np.stack(
                [res[2] for res in results if res[0] == L and res[1] == k]
            )
            means = deltas.mean(axis=0)
            for i, sigma in enumerate(grid):
                _, sem = _mean_sem(deltas[:, i])
                rows.append(
                    {
                        "L": L,
                        "k": k,
                        "sigma": float(sigma),
                        "sigma_c": sigma_c,
                        "delta_mean": float(means[i]),
                        "delta_sem": sem,
                    }
                )
            usable = (
                (means > 0)
                & (grid < sigma_c)
                & (grid <= config.gap_fit_max * sigma_c + 1e-12)
            )
            if usable.sum() < 5:
                raise DataError(
                    f"only {int(usable.sum())} usable sigma points for "
                    f"(L={L}, k={k}); need at least 5 for the exponent fit"
                )
            x = np.log(sigma_c - grid[usable])
            y = np.log(means[usable] / L)
            coeffs, cov = np.polyfit(x, y, 1, cov=True)
            aggregates.append(
                {
                    "L": L,
                    "k": k,
                    "sigma_c": sigma_c,
                    "gamma": float(coeffs[0]),
                    "gamma_err": float(math.sqrt(cov[0, 0])),
                }
            )
    return ScanResult("gap_scaling", rows, aggregates, _manifest(config, rows))


# ---------------------------------------------------------------------------
# empirical critical disorder vs the analytic band


def _critical_task(config: ScanConfig, task: tuple[int, int, int]) -> dict:
    L, k, r = task
    row = {
        "L": L,
        "k": k,
        "realization": r,
        "sigma_c_emp": None,
        "sigma_2": None,
        "sigma_3": None,
        "status": "ok",
    }
    try:
        params = config.params(L, k)
        decomp = decompose(params, r)
        rotate = predict_ensemble(L, k) is EnsembleClass.GOE
        det = to_real_basis(decomp.deterministic, L) if rotate else decomp.deterministic
        dis = to_real_basis(decomp.disordered, L) if rotate else decomp.disordered
        pref_det = decomp.prefactor_deterministic
        unit_dis = params.f / math.sqrt(3**k * params.n_subsets)
        decomp = None  # the rotated copies suffice; free the complex originals

        def gap_at(sigma: float) -> float:
            eigs = eigendecompose(pref_det * det + sigma * unit_dis * dis).eigenvalues
            eigs = _processed_spectrum(eigs, L, k)
            return _outlier_bulk_gap(eigs, L, k)

        # The outlier-bulk gap shrinks while the ground state stays detached
        # and grows (with the overall disorder scale) once it has merged; the
        # interior minimum of the gap locates the merge.
        hi = config.merge_scan_max * abs(config.mu)
        coarse = np.linspace(hi / MERGE_SCAN_POINTS, hi, MERGE_SCAN_POINTS)
        gaps = np.array([gap_at(s) for s in coarse])
        best = int(np.argmin(gaps))
        if (
            best == 0
            or best >= len(coarse) - 1
            or gaps[best:].max() < MERGE_RISE_FACTOR * gaps[best]
        ):
            raise NumericError(
                f"no interior merge point on (0, {hi:g}]: the outlier-bulk gap "
                "does not pass through a rising minimum"
            )
        fine = np.linspace(
            coarse[best - 1], coarse[best + 1], MERGE_REFINE_POINTS
        )
        fine_gaps = np.array([gap_at(s) for s in fine])
        row["sigma_c_emp"] = float(fine[int(np.argmin(fine_gaps))])
    except (DataError, NumericError) as exc:
        row["status"] = f"error: {exc}"
    return row


def critical_disorder_experiment(config: ScanConfig) -> ScanResult:
    config = config.validated()
    rows = _parallel_map(
        partial(_critical_task, config), _grid_tasks(config), config.threads
    )
    aggregates = []
    for L in config.L_values:
        for k in config.k_values:
            params = config.params(L, k)
            band = {}
            for s_level in (2.0, 3.0):
                try:
                    band[s_level] = sigma_s_estimate(params, s_level)
                except NumericError:
                    band[s_level] = None
            for row in rows:
                if row["L"] == L and row["k"] == k:
                    row["sigma_2"] = band[2.0]
                    row["sigma_3"] = band[3.0]
            values = np.array(
                [
                    row["sigma_c_emp"]
                    for row in rows
                    if row["L"] == L and row["k"] == k and row["status"] == "ok"
                ]
            )
            mean = float(values.mean()) if len(values) else float("nan")
            std = float(values.std(ddof=1)) if len(values) > 1 else 0.0
            aggregates.append(
                {
                    "L": L,
                    "k": k,
                    "sigma_c_mean": mean,
                    "sigma_c_std": std,
                    "n_ok": int(len(values)),
                    "sigma_2": band[2.0],
                    "sigma_3": band[3.0],
                }
            )
    return ScanResult("critical_band", rows, aggregates, _manifest(config, rows))


# ---------------------------------------------------------------------------
# ground-pair splitting at small disorder


def _splitting_grid(config: ScanConfig) -> np.ndarray:
    if config.sigma_grid is not None:
        return np.asarray(config.sigma_grid, dtype=float)
    scale = abs(config.mu)
    return np.geomspace(0.02 * scale, 0.2 * scale, 8)


def _splitting_task(config: ScanConfig, task: tuple[int, int, int]) -> list[dict]:
    L, k, r = task
    params = config.params(L, k)
    decomp = decompose(params, r)
    rotate = predict_ensemble(L, k) is EnsembleClass.GOE
    rows = []
    for sigma in _splitting_grid(config):
        row = {
            "L": L,
            "k": k,
            "sigma": float(sigma),
            "realization": r,
            "splitting": None,
            "status": "ok",
        }
        try:
            matrix = decomp.assemble(sigma=sigma)
            if rotate:
                matrix = to_real_basis(matrix, L)
            eigs = eigendecompose(matrix).eigenvalues
            if eigs[2] - eigs[1] <= 5.0 * (eigs[1] - eigs[0]):
                raise DataError(
                    f"lowest pair not isolated from the bulk at sigma={sigma:g}"
                )
            row["splitting"] = float(eigs[1] - eigs[0])
        except (DataError, NumericError) as exc:
            row["status"] = f"error: {exc}"
        rows.append(row)
    return rows


def splitting_experiment(config: ScanConfig) -> ScanResult:
    config = config.validated()
    if any(L % 2 or k % 2 for L in config.L_values for k in config.k_values):
        raise ValueError("the splitting fit requires even L and even k")
    nested = _parallel_map(
        partial(_splitting_task, config), _grid_tasks(config), config.threads
    )
    rows = [row for chunk in nested for row in chunk]
    grid = _splitting_grid(config)
    aggregates = []
    for L in config.L_values:
        for k in config.k_values:
            means = []
            kept_sigma = []
            for sigma in grid:
                values = np.array(
                    [
                        row["splitting"]
                        for row in rows
                        if row["L"] == L
                        and row["k"] == k
                        and row["status"] == "ok"
                        and row["sigma"] == float(sigma)
                    ]
                )
                if len(values):
                    means.append(values.mean())
                    kept_sigma.append(sigma)
            if len(means) < 3:
                raise DataError(
                    f"too few usable sigma points for the splitting fit at "
                    f"(L={L}, k={k})"
                )
            coeffs, cov = np.polyfit(np.log(kept_sigma), np.log(means), 1, cov=True)
            aggregates.append(
                {
                    "L": L,
                    "k": k,
                    "exponent": float(coeffs[0]),
                    "exponent_err": float(math.sqrt(cov[0, 0])),
                    "expected_exponent": L / 2,
                }
            )
    return ScanResult("splitting", rows, aggregates, _manifest(config, rows))


# ---------------------------------------------------------------------------
# persistence


_DISPATCH = {
    "level_stats": level_statistics_experiment,
    "spacing_hist": spacing_distribution_experiment,
    "spectrum_scan": spectrum_vs_disorder_scan,
    "outlier_accuracy": outlier_accuracy_experiment,
    "gap_scaling": gap_scaling_experiment,
    "critical_band": critical_disorder_experiment,
    "splitting": splitting_experiment,
}


def _manifest(config: ScanConfig, rows: list[dict]) -> dict:
    echo = asdict(config)
    for key, value in echo.items():
        if isinstance(value, tuple):
            echo[key] = list(value)
    return {
        "experiment": config.experiment,
        "config": echo,
        "master_seed": config.master_seed,
        "code_version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "row_count": len(rows),
        "columns": list(SCHEMAS[config.experiment]),
    }


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_csv(path, experiment: str, rows: list[dict]) -> None:
    columns = SCHEMAS[experiment]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(row.get(col)) for col in columns])


def run(config: ScanConfig) -> ScanResult:
    """Dispatch an experiment; persist CSV + manifest when out_dir is set."""
    config = config.validated()
    result = _DISPATCH[config.experiment](config)
    if config.out_dir is not None:
        out = Path(config.out_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
            write_csv(out / f"{config.experiment}.csv", config.experiment, result.rows)
            manifest = dict(result.manifest)
            manifest["aggregates"] = result.aggregates
            with open(out / "manifest.json", "w") as fh:
                json.dump(manifest, fh, indent=2, sort_keys=True, default=float)
                fh.write("\n")
        except OSError as exc:
            raise OSError(f"failed to persist results under {out}: {exc}") from exc
    return result


__all__ = [
    "DEFAULT_REALIZATIONS",
    "EXPERIMENTS",
    "SCHEMAS",
    "ScanConfig",
    "ScanResult",
    "critical_disorder_experiment",
    "gap_scaling_experiment",
    "level_statistics_experiment",
    "outlier_accuracy_experiment",
    "run",
    "spacing_distribution_experiment",
    "spectrum_vs_disorder_scan",
    "splitting_experiment",
    "write_csv",
]
