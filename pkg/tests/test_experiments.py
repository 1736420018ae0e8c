import json
import math

import numpy as np
import pytest

from kspin import cli
from kspin.errors import ResourceError
from kspin.experiments import (
    SCHEMAS,
    ScanConfig,
    critical_disorder_experiment,
    gap_scaling_experiment,
    level_statistics_experiment,
    outlier_accuracy_experiment,
    run,
    spacing_distribution_experiment,
    spectrum_vs_disorder_scan,
    splitting_experiment,
)


def small_config(**kw):
    base = dict(
        experiment="level_stats",
        L_values=(6,),
        k_values=(2,),
        mu=0.0,
        sigma=1.0,
        realizations=6,
        threads=1,
    )
    base.update(kw)
    return ScanConfig(**base)


def test_config_validation():
    with pytest.raises(ValueError):
        small_config(experiment="unknown").validated()
    with pytest.raises(ValueError):
        small_config(k_values=(9,)).validated()
    with pytest.raises(ValueError):
        small_config(realizations=0).validated()
    with pytest.raises(ValueError):
        small_config(mu=-1.0).validated()  # level stats runs at mu=0, sigma=1
    with pytest.raises(ValueError):
        ScanConfig(
            experiment="gap_scaling", L_values=(8,), k_values=(4,), mu=0.4
        ).validated()


def test_resource_caps_refuse_before_allocation():
    with pytest.raises(ResourceError):
        small_config(L_values=(13,), k_values=(2,)).validated()
    with pytest.raises(ResourceError):
        ScanConfig(
            experiment="spectrum_scan",
            L_values=(12,),
            k_values=(2,),
            mu=-1.0,
        ).validated()


def test_level_stats_rows_and_aggregates(tmp_path):
    result = run(small_config(out_dir=str(tmp_path / "out")))
    assert [row["realization"] for row in result.rows] == list(range(6))
    assert all(row["status"] == "ok" for row in result.rows)
    agg = result.aggregates[0]
    assert agg["predicted"] == "GOE"
    assert 0.2 < agg["mean_r"] < 0.9

    csv_path = tmp_path / "out" / "level_stats.csv"
    lines = csv_path.read_text().splitlines()
    assert lines[0] == ",".join(SCHEMAS["level_stats"])
    assert len(lines) == 7

    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["experiment"] == "level_stats"
    assert manifest["master_seed"] == 20240801
    assert manifest["row_count"] == 6
    assert manifest["columns"] == list(SCHEMAS["level_stats"])
    assert manifest["config"]["L_values"] == [6]
    assert "code_version" in manifest and "created_utc" in manifest


def test_rerun_and_worker_counts_are_byte_identical(tmp_path):
    outputs = []
    for idx, threads in enumerate((1, 2, 8)):
        out = tmp_path / f"run{idx}"
        run(small_config(threads=threads, out_dir=str(out)))
        outputs.append((out / "level_stats.csv").read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]
    again = tmp_path / "again"
    run(small_config(threads=2, out_dir=str(again)))
    assert (again / "level_stats.csv").read_bytes() == outputs[0]


def test_gse_cells_are_sector_halved():
    result = level_statistics_experiment(
        small_config(L_values=(5,), k_values=(2,), realizations=4)
    )
    assert all(row["status"] == "ok" for row in result.rows)
    assert result.aggregates[0]["predicted"] == "GSE"


def test_spacing_histogram_schema_and_normalization():
    config = ScanConfig(
        experiment="spacing_hist",
        L_values=(7,),
        k_values=(3,),
        realizations=8,
        threads=2,
    )
    result = spacing_distribution_experiment(config)
    assert len(result.rows) == config.hist_bins
    widths = np.array([row["s_hi"] - row["s_lo"] for row in result.rows])
    densities = np.array([row["density"] for row in result.rows])
    assert abs((widths * densities).sum() - 1.0) < 1e-6
    assert result.aggregates[0]["predicted"] == "GUE"
    # level repulsion: the first bin is nearly empty
    assert densities[0] < 0.1


def test_spacing_histogram_matches_surmise_at_statistical_floor():
    # oracle first: sample the GOE surmise through its exact inverse CDF at
    # the same count and binning, and use 3x its mean-square bin deviation
    # as the statistical floor the measured histogram must reach.
    config = ScanConfig(
        experiment="spacing_hist",
        L_values=(10,),
        k_values=(2,),
        realizations=32,
        threads=2,
    )
    result = spacing_distribution_experiment(config)
    agg = result.aggregates[0]
    assert agg["predicted"] == "GOE"

    rng = np.random.default_rng(123)
    edges = np.linspace(0.0, config.hist_max, config.hist_bins + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    from kspin.rmt import EnsembleClass, wigner_surmise

    surmise = wigner_surmise(EnsembleClass.GOE, centers)
    floors = []
    for _ in range(4):
        u = rng.random(agg["n_spacings"])
        synthetic = np.sqrt(-4.0 * np.log1p(-u) / math.pi)
        density, _ = np.histogram(synthetic, bins=edges, density=True)
        floors.append(np.mean((density - surmise) ** 2))
    assert agg["mean_sq_deviation"] < 3.0 * np.mean(floors)


def test_ground_state_entropy_jumps_at_merge():
    config = ScanConfig(
        experiment="spectrum_scan",
        L_values=(8,),
        k_values=(4,),
        mu=-1.0,
        sigma_grid=(0.2, 2.0),
        realizations=1,
    )
    result = spectrum_vs_disorder_scan(config)
    ground = {
        row["sigma"]: row["entropy_norm"]
        for row in result.rows
        if row["level_index"] == 0
    }
    assert ground[0.2] < 0.5  # detached: remembers its product state
    assert ground[2.0] > 0.9  # merged: thermal edge state


def test_gap_is_size_independent_without_kac_rescaling():
    deltas = {}
    for L in (9, 10):
        config = ScanConfig(
            experiment="gap_scaling",
            L_values=(L,),
            k_values=(5,),
            mu=-1.0,
            realizations=4,
            threads=2,
            f_mode="constant",
        )
        rows = gap_scaling_experiment(config).rows
        deltas[L] = np.array([row["delta_mean"] for row in rows])
    # same fraction-of-sigma_c grid points: the gap no longer grows with L
    ratio = deltas[10][:6] / deltas[9][:6]
    assert np.all(np.abs(ratio - 1.0) < 0.10)


def test_spacing_failure_carries_context():
    from kspin.errors import NumericError

    config = ScanConfig(
        experiment="spacing_hist",
        L_values=(5,),  # 32 levels: too few to unfold
        k_values=(3,),
        realizations=2,
        threads=1,
    )
    with pytest.raises(NumericError, match=r"\(L=5, k=3, realization=0\)"):
        spacing_distribution_experiment(config)


def test_spectrum_scan_rows(tmp_path):
    config = ScanConfig(
        experiment="spectrum_scan",
        L_values=(6,),
        k_values=(3,),
        mu=-1.0,
        sigma_grid=(0.0, 0.4),
        realizations=1,
        out_dir=str(tmp_path),
    )
    result = run(config)
    assert len(result.rows) == 2 * 64
    zero_column = [row for row in result.rows if row["sigma"] == 0.0]
    from kspin.theory import disorder_free_spectrum

    expected = disorder_free_spectrum(6, 3, -1.0).as_multiset()
    assert np.abs(np.array([r["energy"] for r in zero_column]) - expected).max() < 1e-8
    assert all(0.0 <= row["entropy_norm"] < 1.3 for row in result.rows)
    assert (tmp_path / "spectrum_scan.csv").exists()


def test_outlier_accuracy_rows():
    config = ScanConfig(
        experiment="outlier_accuracy",
        L_values=(8,),
        k_values=(4,),
        mu=-1.0,
        sigma_grid=(0.0, 0.2, 0.4),
        realizations=6,
        threads=2,
    )
    result = outlier_accuracy_experiment(config)
    by_sigma = {row["sigma"]: row for row in result.rows}
    assert by_sigma[0.0]["mean_abs_diff"] < 1e-10
    assert by_sigma[0.4]["mean_abs_diff"] > by_sigma[0.0]["mean_abs_diff"]
    assert result.aggregates[0]["n_sigma_total"] == 3


def test_gap_scaling_smoke():
    config = ScanConfig(
        experiment="gap_scaling",
        L_values=(8,),
        k_values=(4,),
        mu=-1.0,
        realizations=3,
        threads=2,
    )
    result = gap_scaling_experiment(config)
    agg = result.aggregates[0]
    assert agg["sigma_c"] == pytest.approx(math.sqrt(1 - 2 / 70), abs=1e-12)
    assert 0.5 < agg["gamma"] < 3.5
    sigmas = [row["sigma"] for row in result.rows]
    assert sigmas == sorted(sigmas)
    assert all(row["delta_mean"] > 0 for row in result.rows)


def test_critical_band_rows_and_units():
    config = ScanConfig(
        experiment="critical_band",
        L_values=(8,),
        k_values=(2,),
        mu=-1.0,
        realizations=4,
        threads=2,
    )
    result = critical_disorder_experiment(config)
    ok = [row for row in result.rows if row["status"] == "ok"]
    assert ok, "at least one realization should locate a merge"
    for row in ok:
        assert 0.0 < row["sigma_c_emp"] < 1.5
        assert row["sigma_2"] == pytest.approx(0.8554, abs=2e-4)
        assert row["sigma_3"] == pytest.approx(0.3150, abs=2e-4)
    agg = result.aggregates[0]
    assert agg["n_ok"] == len(ok)


def test_splitting_fit_and_error_rows():
    config = ScanConfig(
        experiment="splitting",
        L_values=(4,),
        k_values=(2,),
        mu=-1.0,
        sigma_grid=(0.02, 0.05, 0.12, 1.8),
        realizations=4,
        threads=1,
    )
    result = splitting_experiment(config)
    agg = result.aggregates[0]
    assert agg["expected_exponent"] == 2.0
    assert abs(agg["exponent"] - 2.0) < 0.6
    for row in result.rows:
        if row["status"] != "ok":
            assert row["splitting"] is None
            assert row["status"].startswith("error:")
    with pytest.raises(ValueError):
        splitting_experiment(small_config(experiment="splitting", mu=-1.0, L_values=(5,)))


def test_cli_classify(capsys):
    assert cli.main(["classify", "--L", "9", "--k", "2"]) == 0
    out = capsys.readouterr().out
    assert "GSE" in out and "0.67" in out


def test_cli_run_and_config_override(tmp_path):
    config_file = tmp_path / "config.json"
    config_file.write_text(
        json.dumps(
            {
                "L_values": [5],
                "k_values": [2],
                "realizations": 2,
                "threads": 1,
            }
        )
    )
    out_dir = tmp_path / "cli_out"
    code = cli.main(
        [
            "level-stats",
            "--config",
            str(config_file),
            "--realizations",
            "3",
            "--out",
            str(out_dir),
        ]
    )
    assert code == 0
    lines = (out_dir / "level_stats.csv").read_text().splitlines()
    assert len(lines) == 4  # header + 3 realizations (CLI overrides the file)
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert manifest["config"]["realizations"] == 3


def test_cli_rejects_bad_input(capsys):
    assert cli.main(["level-stats", "--L", "20", "--k", "2"]) == 1
    assert "error:" in capsys.readouterr().err


def test_cli_sigma_grid_parsing():
    assert cli._sigma_grid("0:1:5") == (0.0, 0.25, 0.5, 0.75, 1.0)
    assert cli._sigma_grid("0.1,0.2") == (0.1, 0.2)
