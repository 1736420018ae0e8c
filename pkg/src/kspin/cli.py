"""Command-line laboratory: `kspin <experiment> [flags]`.

Flags override values from an optional JSON config file (--config), which
mirrors the ScanConfig fields.  Every run writes one CSV (documented schema)
plus a manifest.json into --out.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .ensemble import EnsembleParams, build_hamiltonian, sample_couplings
from .experiments import ScanConfig, run
from .rmt import classify_empirical, gap_ratios, predict_ensemble, trim_edges
from .spectral import degeneracy_sector, eigendecompose
from .errors import KspinError

_COMMAND_TO_EXPERIMENT = {
    "level-stats": "level_stats",
    "spacing": "spacing_hist",
    "spectrum-scan": "spectrum_scan",
    "outlier": "outlier_accuracy",
    "gap-scaling": "gap_scaling",
    "critical-band": "critical_band",
    "splitting": "splitting",
}


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(","))


def _sigma_grid(text: str) -> tuple[float, ...]:
    if ":" in text:
        lo, hi, steps = text.split(":")
        return tuple(float(x) for x in np.linspace(float(lo), float(hi), int(steps)))
    return tuple(float(x) for x in text.split(","))


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--L", type=_int_list, help="comma list of system sizes")
    parser.add_argument("--k", type=_int_list, help="comma list of localities")
    parser.add_argument("--mu", type=float, help="coupling mean scale")
    parser.add_argument("--sigma", type=float, help="disorder strength")
    parser.add_argument(
        "--sigma-grid",
        type=_sigma_grid,
        help="disorder grid, min:max:steps or comma list",
    )
    parser.add_argument("--realizations", type=int, help="disorder realizations")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--out", help="output directory (CSV + manifest.json)")
    parser.add_argument("--f-mode", choices=("extensive", "constant"))
    parser.add_argument("--threads", type=int, help="worker processes")
    parser.add_argument("--config", help="JSON config file mirroring ScanConfig")
    parser.add_argument("--max-l", type=int, help="dense-matrix resource cap")
    parser.add_argument("--merge-factor", type=float, help="merge criterion factor")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kspin",
        description="k-local random spin Hamiltonians: exact diagonalization lab",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    classify = sub.add_parser(
        "classify", help="predict (and optionally measure) the symmetry class"
    )
    classify.add_argument("--L", type=int, required=True)
    classify.add_argument("--k", type=int, required=True)
    classify.add_argument(
        "--real-terms",
        action="store_true",
        help="treat the matrix as purely real in the computational basis",
    )
    classify.add_argument(
        "--realizations",
        type=int,
        default=0,
        help="if > 0, also measure <r> over this many realizations",
    )
    classify.add_argument("--seed", type=int, default=20240801)

    for command in _COMMAND_TO_EXPERIMENT:
        cmd = sub.add_parser(command, help=f"run the {command} experiment")
        _add_common(cmd)
    return parser


def _config_from_args(args: argparse.Namespace) -> ScanConfig:
    values: dict = {}
    if args.config:
        with open(args.config) as fh:
            file_values = json.load(fh)
        for key, value in file_values.items():
            if isinstance(value, list):
                value = tuple(value)
            values[key] = value
    overrides = {
        "L_values": args.L,
        "k_values": args.k,
        "mu": args.mu,
        "sigma": args.sigma,
        "sigma_grid": args.sigma_grid,
        "realizations": args.realizations,
        "master_seed": args.seed,
        "out_dir": args.out,
        "f_mode": args.f_mode,
        "threads": args.threads,
        "max_dense_l": args.max_l,
        "merge_factor": args.merge_factor,
    }
    for key, value in overrides.items():
        if value is not None:
            values[key] = value
    values["experiment"] = _COMMAND_TO_EXPERIMENT[args.command]
    # Part-I experiments run at the fully disordered point unless told otherwise.
    if values["experiment"] in ("level_stats", "spacing_hist"):
        values.setdefault("mu", 0.0)
        values.setdefault("sigma", 1.0)
    return ScanConfig(**values)


def _run_classify(args: argparse.Namespace) -> int:
    predicted = predict_ensemble(args.L, args.k, all_terms_real=args.real_terms)
    t_sq = "x" if args.k % 2 else ("-1" if args.L % 2 else "+1")
    print(
        f"L={args.L} k={args.k}: predicted {predicted.value} "
        f"(T^2 = {t_sq}, reference <r> = {predicted.reference_mean_r})"
    )
    if args.realizations > 0:
        params = EnsembleParams(
            L=args.L, k=args.k, mu=0.0, sigma=1.0, master_seed=args.seed
        )
        means = []
        for r in range(args.realizations):
            matrix = build_hamiltonian(params, sample_couplings(params, r))
            eigs = eigendecompose(matrix).eigenvalues
            if predicted.value == "GSE":
                eigs = degeneracy_sector(eigs).eigenvalues
            means.append(float(gap_ratios(trim_edges(eigs)).mean()))
        mean_r = float(np.mean(means))
        label, distance = classify_empirical(mean_r)
        print(
            f"measured <r> = {mean_r:.4f} over {args.realizations} realizations "
            f"-> nearest {label.value} (distance {distance:.4f})"
        )
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "classify":
            return _run_classify(args)
        result = run(_config_from_args(args))
    except (KspinError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"{result.experiment}: {len(result.rows)} rows")
    for agg in result.aggregates:
        print("  " + "  ".join(f"{key}={value}" for key, value in agg.items()))
    if result.manifest.get("config", {}).get("out_dir"):
        print(f"written to {result.manifest['config']['out_dir']}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
