"""
Tests for the experiment drivers

Usage:
    python -m pytest tests/test_harness.py -v
    python -m pytest tests/test_harness.py -m slow
"""

import csv
import json
import os
import sys

import numpy as np
import pytest

# Add src directory to path
sys.path.append(os.path.join(os.path.dirname(__file__), "..", "src"))

from bacl_spectra.errors import ConfigError
from bacl_spectra.harness import (
    ExperimentConfig,
    cached_weights,
    load_manifest,
    run_experiment,
    weight_cache_path,
)


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def small_config(tmp_path, experiment, **overrides):
    values = dict(
        experiment=experiment,
        m0_list=[2],
        order_list=[30],
        trials=4,
        epsilon=0.5,
        batch=10,
        seed=11,
        out_dir=str(tmp_path / experiment),
        cache_dir=str(tmp_path / "cache"),
    )
    values.update(overrides)
    return ExperimentConfig(**values)


class TestExperimentConfig:
    """Test cases for ExperimentConfig validation"""

    def test_zero_trials(self, tmp_path):
        """Test trials = 0"""
        with pytest.raises(ConfigError):
            small_config(tmp_path, "spectral-bulk", trials=0).validate()

    def test_empty_orders(self, tmp_path):
        """Test an empty order list"""
        with pytest.raises(ConfigError):
            small_config(tmp_path, "scaling", order_list=[]).validate()

    def test_orders_not_ascending(self, tmp_path):
        """Test descending orders"""
        with pytest.raises(ConfigError):
            small_config(tmp_path, "scaling", order_list=[64, 32]).validate()

    def test_unknown_experiment(self, tmp_path):
        """Test experiment name validation"""
        with pytest.raises(ConfigError):
            small_config(tmp_path, "laplacian").validate()

    @pytest.mark.parametrize("experiment, trials", [("extreme-eigs", 29), ("principal-vec", 9)])
    def test_minimum_trials(self, tmp_path, experiment, trials):
        """Test per-experiment trial minimums"""
        with pytest.raises(ConfigError):
            small_config(tmp_path, experiment, trials=trials).validate()

    def test_m0_must_be_below_orders(self, tmp_path):
        """Test m0 >= n"""
        with pytest.raises(ConfigError):
            small_config(tmp_path, "spectral-bulk", m0_list=[30]).validate()

    def test_marked_outside_graph(self, tmp_path):
        """Test marked node index above n"""
        with pytest.raises(ConfigError):
            small_config(tmp_path, "ctqw-search", marked=[31]).validate()

    def test_from_mapping_rejects_unknown_keys(self):
        """Test unknown settings"""
        with pytest.raises(ConfigError):
            ExperimentConfig.from_mapping({"experiment": "scaling", "colour": "red"})

    def test_from_mapping_accepts_dashes(self):
        """Test flag-style keys"""
        cfg = ExperimentConfig.from_mapping({"experiment": "scaling", "rel-tol": 0.3})
        assert cfg.rel_tol == 0.3


class TestWeightCache:
    """Test cases for cached_weights"""

    def test_derived_once_then_loaded(self, tmp_path):
        """Test that the cache file is written and reused"""
        cfg = small_config(tmp_path, "derive-weights")
        path = weight_cache_path(cfg, 30, 2)
        assert not path.exists()
        first = cached_weights(cfg, 30, 2)
        assert path.exists()
        assert np.array_equal(cached_weights(cfg, 30, 2), first)
        assert first.sum() == pytest.approx(2 + 4 * 28)


class TestExperiments:
    """Test cases for the experiment drivers at toy scale"""

    def test_spectral_bulk(self, tmp_path):
        """Test the bulk table and the component table"""
        cfg = small_config(tmp_path, "spectral-bulk", m0_list=[1, 3])
        manifest = run_experiment(cfg)
        rows = read_rows(tmp_path / "spectral-bulk" / "spectral_bulk.csv")
        assert list(rows[0]) == ["n", "m0", "pair_index", "p_value"]
        assert len(rows) == 8
        assert all(0.0 <= float(r["p_value"]) <= 1.0 for r in rows)
        components = read_rows(tmp_path / "spectral-bulk" / "spectral_bulk_components.csv")
        assert all(r["ba_components"] == "1" for r in components)
        assert manifest.outputs == ["spectral_bulk.csv", "spectral_bulk_components.csv"]
        assert "n=30,m0=1,cl" in manifest.trial_seeds

    def test_identical_graph_control(self, tmp_path):
        """Test BA against itself gives D = 0 for every pair"""
        cfg = small_config(tmp_path, "spectral-bulk", reference="ba-same")
        run_experiment(cfg)
        rows = read_rows(tmp_path / "spectral-bulk" / "spectral_bulk.csv")
        assert all(float(r["p_value"]) >= 0.99 for r in rows)

    def test_extreme_eigs(self, tmp_path):
        """Test the three rows per cell"""
        cfg = small_config(tmp_path, "extreme-eigs", trials=30, reference="ba")
        run_experiment(cfg)
        rows = read_rows(tmp_path / "extreme-eigs" / "extreme_eigs.csv")
        assert [r["which"] for r in rows] == ["first", "second", "last"]
        first = rows[0]
        assert float(first["mean_ba"]) > 0 and float(first["mean_cl"]) > 0
        assert 0.0 <= float(first["p_value_standardized"]) <= 1.0

    def test_extreme_eigs_null_calibration(self, tmp_path):
        """Test BA against independent BA does not reject more often than the nominal level over 40 cells"""
        cfg = small_config(tmp_path, "extreme-eigs", order_list=list(range(40, 80)), trials=30, reference="ba")
        run_experiment(cfg)
        rows = read_rows(tmp_path / "extreme-eigs" / "extreme_eigs.csv")
        p = np.asarray([float(r["p_value_standardized"]) for r in rows])
        assert p.size == 120
        # own-sample standardization makes the test conservative, so p leans toward 1
        assert np.mean(p < 0.1) <= 0.15
        assert np.mean(p < 0.95) >= 0.2

    def test_principal_vec_identical_control(self, tmp_path):
        """Test the identical-graph control gives zero for both measures"""
        cfg = small_config(tmp_path, "principal-vec", trials=10, reference="ba-same")
        run_experiment(cfg)
        rows = read_rows(tmp_path / "principal-vec" / "principal_vec.csv")
        assert len(rows) == 10
        assert all(float(r["euclid_half"]) == 0.0 and float(r["inf_norm"]) == 0.0 for r in rows)

    def test_principal_vec_independent_samples(self, tmp_path):
        """Test two independent BA samples are at positive distance"""
        cfg = small_config(tmp_path, "principal-vec", trials=10, reference="ba")
        run_experiment(cfg)
        rows = read_rows(tmp_path / "principal-vec" / "principal_vec.csv")
        assert all(float(r["euclid_half"]) > 0 for r in rows if not r["flag"])

    def test_ctqw(self, tmp_path):
        """Test optimal times and curves for several marked nodes"""
        cfg = small_config(tmp_path, "ctqw-search", trials=2, marked=[7, 10], tmax=3.0, reference="ba")
        run_experiment(cfg)
        rows = read_rows(tmp_path / "ctqw-search" / "ctqw_optimal.csv")
        assert len(rows) == 2 * 2 * 2
        assert {r["marked"] for r in rows} == {"7", "10"}
        assert {r["model"] for r in rows} == {"ba", "ba-reference"}
        curves = read_rows(tmp_path / "ctqw-search" / "ctqw_curves.csv")
        assert len(curves) == 2 * 2 * 31
        first = [r for r in curves if r["model"] == "ba" and r["marked"] == "7"]
        assert float(first[0]["p"]) == pytest.approx(1 / 30)

    def test_ctqw_default_grids(self, tmp_path):
        """Test marked node 20 uses the longer grid"""
        cfg = small_config(tmp_path, "ctqw-search", trials=1, marked=[20], reference="ba")
        run_experiment(cfg)
        curves = read_rows(tmp_path / "ctqw-search" / "ctqw_curves.csv")
        assert max(float(r["t"]) for r in curves) == pytest.approx(25.0)

    def test_scaling(self, tmp_path):
        """Test scaling tables for both models"""
        cfg = small_config(tmp_path, "scaling", order_list=[16, 32], trials=2)
        run_experiment(cfg)
        summary = read_rows(tmp_path / "scaling" / "scaling_summary.csv")
        assert [r["model"] for r in summary] == ["ba", "cl"]
        assert all(np.isfinite(float(r["alpha"])) for r in summary)
        assert len(read_rows(tmp_path / "scaling" / "scaling.csv")) == 4

    def test_derive_weights(self, tmp_path):
        """Test one weight file per cell and the summary table"""
        cfg = small_config(tmp_path, "derive-weights", order_list=[20, 30])
        manifest = run_experiment(cfg)
        assert "weights_n20_m02.csv" in manifest.outputs
        rows = read_rows(tmp_path / "derive-weights" / "derive_weights.csv")
        assert [int(r["n"]) for r in rows] == [20, 30]
        assert float(rows[0]["sum_w"]) == pytest.approx(2 + 4 * 18)

    def test_degree_law(self, tmp_path):
        """Test both law comparisons per cell"""
        cfg = small_config(tmp_path, "degree-law", order_list=[200])
        run_experiment(cfg)
        rows = read_rows(tmp_path / "degree-law" / "degree_law.csv")
        assert [r["law"] for r in rows] == ["pmf", "density"]
        assert all(0.0 <= float(r["distance"]) <= 1.0 for r in rows)


class TestReproducibility:
    """Test cases for manifests and byte-identical reruns"""

    def test_manifest_contents(self, tmp_path):
        """Test the manifest echoes config, seeds and version"""
        cfg = small_config(tmp_path, "spectral-bulk", reference="ba")
        run_experiment(cfg)
        data = json.loads((tmp_path / "spectral-bulk" / "manifest.json").read_text())
        assert data["master_seed"] == 11
        assert data["config"]["experiment"] == "spectral-bulk"
        assert len(data["trial_seeds"]["n=30,m0=2,ba"]) == 4
        assert data["tool_version"]
        assert data["started"] <= data["finished"]

    def test_rerun_from_manifest_with_workers(self, tmp_path):
        """Test a manifest rerun on two workers reproduces every CSV"""
        first = small_config(tmp_path, "spectral-bulk", m0_list=[1, 2])
        run_experiment(first)
        cfg = load_manifest(tmp_path / "spectral-bulk" / "manifest.json")
        cfg.out_dir = str(tmp_path / "rerun")
        cfg.workers = 2
        run_experiment(cfg)
        for name in ("spectral_bulk.csv", "spectral_bulk_components.csv"):
            original = (tmp_path / "spectral-bulk" / name).read_bytes()
            assert (tmp_path / "rerun" / name).read_bytes() == original

    @pytest.mark.slow
    def test_spectral_bulk_threshold(self, tmp_path):
        """Test bulk similarity at n=400 with 50 pairs rises with m0 as CL fragmentation falls"""
        cfg = ExperimentConfig(
            experiment="spectral-bulk", m0_list=[1, 2, 5], order_list=[400], trials=50, out_dir=str(tmp_path)
        )
        run_experiment(cfg)
        rows = read_rows(tmp_path / "spectral_bulk.csv")
        median = {m0: np.median([float(r["p_value"]) for r in rows if r["m0"] == str(m0)]) for m0 in (1, 2, 5)}
        assert median[5] > 0.5
        assert median[1] < 0.75 * median[5]
        components = read_rows(tmp_path / "spectral_bulk_components.csv")
        pieces = {
            m0: np.mean([int(r["reference_components"]) for r in components if r["m0"] == str(m0)]) for m0 in (1, 2, 5)
        }
        assert pieces[1] > pieces[2] > pieces[5]
        assert all(r["ba_components"] == "1" for r in components)

    @pytest.mark.slow
    def test_spectral_bulk_m0_one_separates_with_order(self, tmp_path):
        """Test the m0=1 median p-value drops below 0.1 once n grows from 400 to 1600"""
        cfg = ExperimentConfig(
            experiment="spectral-bulk", m0_list=[1], order_list=[400, 1600], trials=25, epsilon=0.1, out_dir=str(tmp_path)
        )
        run_experiment(cfg)
        rows = read_rows(tmp_path / "spectral_bulk.csv")
        median = {n: np.median([float(r["p_value"]) for r in rows if r["n"] == str(n)]) for n in (400, 1600)}
        assert median[1600] < median[400]
        assert median[1600] < 0.1

    @pytest.mark.slow
    def test_principal_vectors_detached(self, tmp_path):
        """Test BA and CL Perron vectors stay apart at n=2000, m0=4"""
        cfg = ExperimentConfig(
            experiment="principal-vec", m0_list=[4], order_list=[2000], trials=30, out_dir=str(tmp_path)
        )
        run_experiment(cfg)
        rows = [r for r in read_rows(tmp_path / "principal_vec.csv") if not r["flag"]]
        assert np.mean([float(r["euclid_half"]) for r in rows]) > 0.1

    @pytest.mark.slow
    def test_first_eigenvalue_means_agree(self, tmp_path):
        """Test BA and CL lambda_1 means within 10% at n=1000, m0=4"""
        cfg = ExperimentConfig(
            experiment="extreme-eigs", m0_list=[4], order_list=[1000], trials=200, workers=4, out_dir=str(tmp_path)
        )
        run_experiment(cfg)
        first = read_rows(tmp_path / "extreme_eigs.csv")[0]
        mean_ba, mean_cl = float(first["mean_ba"]), float(first["mean_cl"])
        assert abs(mean_ba - mean_cl) / mean_ba < 0.1
