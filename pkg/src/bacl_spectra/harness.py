"""
Experiment drivers

Every experiment iterates over (n, m0) cells, draws its graphs from seeds
derived from the master seed and the cell/trial indices, runs trials over the
worker pool and writes plot-ready CSV tables plus a JSON run manifest. Rows
are produced in trial order, so the CSV files are byte-identical for any
worker count.

Seed keys: BA graphs use (n, m0, 0, trial), Chung-Lu graphs (n, m0, 1, trial),
weight derivation (n, m0, 2) and independent BA reference graphs
(n, m0, 3, trial).
"""

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import build_dataclass
from .ctqw import (
    EvolutionConfig,
    choose_measurement,
    sample_graph,
    search_operator,
    search_scaling,
    success_probabilities,
    uniform_time_grid,
)
from .errors import ConfigError, DegeneracyError
from .generators import derive_seed, generate_ba
from .graph import component_sizes, degrees
from .models import histogram_compare
from .parallel import map_ordered
from .spectra import extreme_eigs, full_spectrum, principal_eigenvector
from .stats import euclid_half_distance, inf_distance, ks_two_sample, mean, standardize
from .weights import DerivationConfig, derive_weights, load_weights, save_weights

logger = logging.getLogger(__name__)

EXPERIMENTS = (
    "spectral-bulk",
    "extreme-eigs",
    "principal-vec",
    "ctqw-search",
    "scaling",
    "derive-weights",
    "degree-law",
)

REFERENCES = ("cl", "ba", "ba-same")

BA_KEY, CL_KEY, WEIGHTS_KEY, REFERENCE_BA_KEY = 0, 1, 2, 3

# Grid length per marked node for the plateau experiment; others use 15
PLATEAU_TMAX = {7: 15.0, 10: 15.0, 20: 25.0}

MIN_TRIALS = {"extreme-eigs": 30, "principal-vec": 10}


@dataclass
class ExperimentConfig:
    """
    Settings of one experiment run

    Attributes:
        experiment (str): One of EXPERIMENTS
        m0_list (list): BA parameters
        order_list (list): Strictly ascending graph orders
        trials (int): Graphs (or graph pairs) per model and cell
        epsilon (float): Weight derivation tolerance
        batch (int): Weight derivation batch size
        max_rounds (int): Weight derivation round cap
        seed (int): Master seed
        workers (int): Worker processes
        out_dir (str): Output directory
        cache_dir (str, optional): Weight cache, defaults to out_dir/weights
        reference (str): Second ensemble: "cl", independent "ba", or the
            identical-graph control "ba-same"
        method (str): Eigensolver selector
        marked (list): 1-based marked node indices (vertex id = index - 1)
        tmax (float, optional): Plateau grid length, default per PLATEAU_TMAX
        dt (float): Plateau grid step
        rule (str): "plateau" or "expected"
        rel_tol (float): Plateau margin
        coeff (float): Expected-time overhead coefficient
        backend (str): Evolution backend
    """

    experiment: str
    m0_list: List[int] = field(default_factory=lambda: [4])
    order_list: List[int] = field(default_factory=lambda: [400])
    trials: int = 50
    epsilon: float = 0.05
    batch: int = 300
    max_rounds: int = 200
    seed: int = 0
    workers: int = 1
    out_dir: str = "results"
    cache_dir: Optional[str] = None
    reference: str = "cl"
    method: str = "auto"
    marked: List[int] = field(default_factory=lambda: [7, 10, 20])
    tmax: Optional[float] = None
    dt: float = 0.1
    rule: str = "plateau"
    rel_tol: float = 0.2
    coeff: float = 0.1
    backend: str = "auto"

    def validate(self) -> None:
        """
        Check the settings

        Raises:
            ConfigError: On any invalid value
        """
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}", allowed=list(EXPERIMENTS))
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}", trials=self.trials)
        minimum = MIN_TRIALS.get(self.experiment, 1)
        if self.trials < minimum:
            raise ConfigError(
                f"{self.experiment} needs at least {minimum} trials, got {self.trials}", trials=self.trials
            )
        if not self.order_list:
            raise ConfigError("order list is empty")
        if any(b <= a for a, b in zip(self.order_list, self.order_list[1:])):
            raise ConfigError("orders must be strictly ascending", orders=list(self.order_list))
        if not self.m0_list or min(self.m0_list) < 1:
            raise ConfigError("m0 list must be non-empty with values >= 1", m0_list=list(self.m0_list))
        if max(self.m0_list) >= min(self.order_list):
            raise ConfigError("every m0 must be smaller than every order")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.reference not in REFERENCES:
            raise ConfigError(f"unknown reference {self.reference!r}", allowed=list(REFERENCES))
        if self.rule not in ("plateau", "expected"):
            raise ConfigError(f"unknown rule {self.rule!r}", allowed=["plateau", "expected"])
        if not self.epsilon > 0 or self.batch < 1:
            raise ConfigError("epsilon must be > 0 and batch >= 1")
        if self.experiment == "ctqw-search":
            if not self.marked or min(self.marked) < 1 or max(self.marked) > min(self.order_list):
                raise ConfigError("marked node indices must lie in [1, n]", marked=list(self.marked))

    @property
    def cells(self) -> List[Tuple[int, int]]:
        return [(n, m0) for n in self.order_list for m0 in self.m0_list]

    @classmethod
    def from_mapping(cls, values: Dict[str, Any]) -> "ExperimentConfig":
        return build_dataclass(cls, values)


@dataclass
class RunManifest:
    """
    Everything needed to re-run an experiment bit-identically

    Attributes:
        config (dict): Echo of the ExperimentConfig
        master_seed (int): Master seed
        trial_seeds (dict): Seed lists keyed "n=<n>,m0=<m0>,<ensemble>"
        tool_version (str): Package version
        started (str): ISO timestamp (UTC)
        finished (str): ISO timestamp (UTC)
        outputs (list): CSV files written, relative to out_dir
    """

    config: Dict[str, Any]
    master_seed: int
    trial_seeds: Dict[str, List[int]]
    tool_version: str
    started: str
    finished: str = ""
    outputs: List[str] = field(default_factory=list)


class _Recorder:
    """Collects seeds and output files of a run"""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.out_dir = Path(cfg.out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.seeds: Dict[str, List[int]] = {}
        self.outputs: List[str] = []

    def trial_seeds(self, n: int, m0: int, key: int, label: str, count: Optional[int] = None) -> List[int]:
        count = self.cfg.trials if count is None else count
        seeds = [derive_seed(self.cfg.seed, n, m0, key, k) for k in range(count)]
        self.seeds[f"n={n},m0={m0},{label}"] = seeds
        return seeds

    def write_csv(self, name: str, fieldnames: Sequence[str], rows: List[Dict[str, Any]]) -> Path:
        path = self.out_dir / name
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(fieldnames), lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({key: _cell(value) for key, value in row.items()})
        self.outputs.append(name)
        logger.info("wrote %d rows to %s", len(rows), path)
        return path


def _cell(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        return "" if math.isnan(value) else repr(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


# Weight vectors


def weight_cache_path(cfg: ExperimentConfig, n: int, m0: int) -> Path:
    cache = Path(cfg.cache_dir) if cfg.cache_dir else Path(cfg.out_dir) / "weights"
    return cache / f"w_n{n}_m0{m0}_seed{cfg.seed}_eps{cfg.epsilon!r}_batch{cfg.batch}.csv"


def _derivation_config(cfg: ExperimentConfig, n: int, m0: int) -> DerivationConfig:
    return DerivationConfig(
        n=n,
        m0=m0,
        batch=cfg.batch,
        epsilon=cfg.epsilon,
        seed=derive_seed(cfg.seed, n, m0, WEIGHTS_KEY),
        max_rounds=cfg.max_rounds,
        workers=cfg.workers,
    )


def cached_weights(cfg: ExperimentConfig, n: int, m0: int) -> np.ndarray:
    """
    Chung-Lu weights for a cell, derived once and cached on disk

    Args:
        cfg (ExperimentConfig): Run settings (seed, epsilon, batch, cache)
        n (int): Graph order
        m0 (int): BA parameter

    Returns:
        np.ndarray: Derived weight vector
    """
    path = weight_cache_path(cfg, n, m0)
    if path.exists():
        logger.debug("weights for n=%d m0=%d loaded from %s", n, m0, path)
        return load_weights(path)
    result = derive_weights(_derivation_config(cfg, n, m0))
    save_weights(path, result.w_bar)
    return result.w_bar


def _reference_plan(cfg: ExperimentConfig, rec: _Recorder, n: int, m0: int, ba_seeds: List[int]):
    """Model, weights and seeds of the second ensemble"""
    if cfg.reference == "cl":
        return "cl", cached_weights(cfg, n, m0), rec.trial_seeds(n, m0, CL_KEY, "cl")
    if cfg.reference == "ba":
        return "ba", None, rec.trial_seeds(n, m0, REFERENCE_BA_KEY, "ba-reference")
    return "ba", None, list(ba_seeds)


# Trial functions (top level so worker processes can pickle them)


def _bulk_pair(n: int, m0: int, model: str, weights, ba_seed: int, ref_seed: int):
    ba = generate_ba(n, m0, ba_seed)
    ref = sample_graph(model, n, m0, ref_seed, weights)
    result = ks_two_sample(full_spectrum(ba), full_spectrum(ref))
    ref_sizes = component_sizes(ref)
    return result.p_value, int(component_sizes(ba).size), int(ref_sizes.size), float(ref_sizes[0] / n)


def _extreme_pair(n: int, m0: int, model: str, weights, ba_seed: int, ref_seed: int, method: str):
    ba = generate_ba(n, m0, ba_seed)
    ref = sample_graph(model, n, m0, ref_seed, weights)
    return extreme_eigs(ba, method=method), extreme_eigs(ref, method=method)


def _principal_pair(n: int, m0: int, model: str, weights, ba_seed: int, ref_seed: int, method: str):
    vectors = []
    for label, graph_model, seed, w in (("ba", "ba", ba_seed, None), ("reference", model, ref_seed, weights)):
        try:
            vectors.append(principal_eigenvector(sample_graph(graph_model, n, m0, seed, w), method=method))
        except DegeneracyError as e:
            logger.warning("degenerate principal vector (%s, seed %d): %s", label, seed, e)
            return float("nan"), float("nan"), f"degenerate-{label}"
    return euclid_half_distance(*vectors), inf_distance(*vectors), ""


def _ctqw_trial(
    model: str,
    n: int,
    m0: int,
    weights,
    seed: int,
    marked: int,
    times: np.ndarray,
    rule: str,
    rel_tol: float,
    coeff: float,
    backend: str,
):
    g = sample_graph(model, n, m0, seed, weights)
    run = success_probabilities(search_operator(g, marked), times, EvolutionConfig(backend=backend))
    choose_measurement(run, rule, rel_tol, coeff)
    return run.t_opt, run.p_opt, run.expected_time, run.probs


def _ba_degrees(n: int, m0: int, seed: int) -> np.ndarray:
    return degrees(generate_ba(n, m0, seed))


# Experiments


def run_derive_weights(cfg: ExperimentConfig, rec: _Recorder) -> None:
    """Derive and cache w for every cell; one weight CSV per cell plus a summary"""
    rows = []
    for n, m0 in cfg.cells:
        dcfg = _derivation_config(cfg, n, m0)
        rec.seeds[f"n={n},m0={m0},weights"] = [dcfg.seed]
        result = derive_weights(dcfg)
        save_weights(weight_cache_path(cfg, n, m0), result.w_bar)
        name = f"weights_n{n}_m0{m0}.csv"
        save_weights(rec.out_dir / name, result.w_bar)
        rec.outputs.append(name)
        rows.append(
            {
                "n": n,
                "m0": m0,
                "rounds": result.rounds,
                "last_sup_delta": result.sup_deltas[-1],
                "sum_w": float(result.w_bar.sum()),
            }
        )
    rec.write_csv("derive_weights.csv", ["n", "m0", "rounds", "last_sup_delta", "sum_w"], rows)


def run_spectral_bulk(cfg: ExperimentConfig, rec: _Recorder) -> None:
    """
    KS p-value of the full spectra of the i-th BA and i-th reference graph

    Writes spectral_bulk.csv (n, m0, pair_index, p_value) and
    spectral_bulk_components.csv with the component counts of each pair.
    """
    rows, component_rows = [], []
    for n, m0 in cfg.cells:
        ba_seeds = rec.trial_seeds(n, m0, BA_KEY, "ba")
        model, weights, ref_seeds = _reference_plan(cfg, rec, n, m0, ba_seeds)
        logger.info("spectral bulk n=%d m0=%d: %d pairs", n, m0, cfg.trials)
        count = cfg.trials
        results = map_ordered(
            _bulk_pair, [n] * count, [m0] * count, [model] * count, [weights] * count, ba_seeds, ref_seeds,
            workers=cfg.workers,
        )
        for index, (p_value, ba_components, ref_components, ref_largest) in enumerate(results):
            rows.append({"n": n, "m0": m0, "pair_index": index, "p_value": p_value})
            component_rows.append(
                {
                    "n": n,
                    "m0": m0,
                    "pair_index": index,
                    "ba_components": ba_components,
                    "reference_components": ref_components,
                    "reference_largest_fraction": ref_largest,
                }
            )
    rec.write_csv("spectral_bulk.csv", ["n", "m0", "pair_index", "p_value"], rows)
    rec.write_csv(
        "spectral_bulk_components.csv",
        ["n", "m0", "pair_index", "ba_components", "reference_components", "reference_largest_fraction"],
        component_rows,
    )


def run_extreme_eigs(cfg: ExperimentConfig, rec: _Recorder) -> None:
    """Means and standardized-sample KS p-values of lambda_1, lambda_2, lambda_n"""
    rows = []
    for n, m0 in cfg.cells:
        ba_seeds = rec.trial_seeds(n, m0, BA_KEY, "ba")
        model, weights, ref_seeds = _reference_plan(cfg, rec, n, m0, ba_seeds)
        count = cfg.trials
        pairs = map_ordered(
            _extreme_pair, [n] * count, [m0] * count, [model] * count, [weights] * count, ba_seeds, ref_seeds,
            [cfg.method] * count, workers=cfg.workers,
        )
        ba = np.asarray([p[0] for p in pairs])
        ref = np.asarray([p[1] for p in pairs])
        for column, which in enumerate(("first", "second", "last")):
            result = ks_two_sample(standardize(ba[:, column]), standardize(ref[:, column]))
            rows.append(
                {
                    "n": n,
                    "m0": m0,
                    "which": which,
                    "mean_ba": mean(ba[:, column]),
                    "mean_cl": mean(ref[:, column]),
                    "p_value_standardized": result.p_value,
                }
            )
    rec.write_csv(
        "extreme_eigs.csv", ["n", "m0", "which", "mean_ba", "mean_cl", "p_value_standardized"], rows
    )


def run_principal_vec(cfg: ExperimentConfig, rec: _Recorder) -> None:
    """Distances between the Perron vectors of paired BA and reference graphs"""
    rows = []
    for n, m0 in cfg.cells:
        ba_seeds = rec.trial_seeds(n, m0, BA_KEY, "ba")
        model, weights, ref_seeds = _reference_plan(cfg, rec, n, m0, ba_seeds)
        count = cfg.trials
        results = map_ordered(
            _principal_pair, [n] * count, [m0] * count, [model] * count, [weights] * count, ba_seeds, ref_seeds,
            [cfg.method] * count, workers=cfg.workers,
        )
        for trial, (euclid, uniform, flag) in enumerate(results):
            rows.append({"n": n, "m0": m0, "trial": trial, "euclid_half": euclid, "inf_norm": uniform, "flag": flag})
    rec.write_csv("principal_vec.csv", ["n", "m0", "trial", "euclid_half", "inf_norm", "flag"], rows)


def run_ctqw(cfg: ExperimentConfig, rec: _Recorder) -> None:
    """
    Optimal measurement times of quantum search on both ensembles

    Writes ctqw_optimal.csv with one row per (model, marked node, trial) and
    ctqw_curves.csv with the probability curves of trial 0 of each model.
    """
    rows, curves = [], []
    for n, m0 in cfg.cells:
        ba_seeds = rec.trial_seeds(n, m0, BA_KEY, "ba")
        model, weights, ref_seeds = _reference_plan(cfg, rec, n, m0, ba_seeds)
        label = {"cl": "cl", "ba": "ba-reference"}.get(cfg.reference, cfg.reference)
        for node in cfg.marked:
            tmax = cfg.tmax if cfg.tmax is not None else PLATEAU_TMAX.get(node, 15.0)
            times = uniform_time_grid(tmax, cfg.dt)
            for name, graph_model, w, seeds in (("ba", "ba", None, ba_seeds), (label, model, weights, ref_seeds)):
                count = len(seeds)
                results = map_ordered(
                    _ctqw_trial, [graph_model] * count, [n] * count, [m0] * count, [w] * count, seeds,
                    [node - 1] * count, [times] * count, [cfg.rule] * count, [cfg.rel_tol] * count,
                    [cfg.coeff] * count, [cfg.backend] * count, workers=cfg.workers,
                )
                for trial, (t_opt, p_opt, expected, probs) in enumerate(results):
                    rows.append(
                        {
                            "n": n, "m0": m0, "model": name, "marked": node, "trial": trial,
                            "t_opt": t_opt, "p_opt": p_opt, "expected_time": expected,
                        }
                    )
                    if trial == 0:
                        curves.extend(
                            {"n": n, "m0": m0, "model": name, "marked": node, "t": t, "p": p}
                            for t, p in zip(times, probs)
                        )
    rec.write_csv(
        "ctqw_optimal.csv", ["n", "m0", "model", "marked", "trial", "t_opt", "p_opt", "expected_time"], rows
    )
    rec.write_csv("ctqw_curves.csv", ["n", "m0", "model", "marked", "t", "p"], curves)


def run_scaling(cfg: ExperimentConfig, rec: _Recorder) -> None:
    """
    Scaling exponent of the minimal expected search time for BA and CL

    The marked vertex is id m0 and the grid is 0, 0.01 pi sqrt(n), ..., pi sqrt(n).
    """
    table_rows, summary_rows = [], []
    for m0 in cfg.m0_list:
        for model, key in (("ba", BA_KEY), ("cl", CL_KEY)):
            for n in cfg.order_list:
                rec.seeds[f"n={n},m0={m0},{model}"] = [
                    derive_seed(cfg.seed, n, m0, key, k) for k in range(cfg.trials)
                ]
            result = search_scaling(
                m0,
                cfg.order_list,
                cfg.trials,
                cfg.seed,
                coeff=cfg.coeff,
                model=model,
                weights_for=lambda order, m0=m0: cached_weights(cfg, order, m0),
                backend=cfg.backend,
                workers=cfg.workers,
            )
            table_rows.extend(
                {"model": model, "m0": m0, "n": n, "mean_expected_time": value} for n, value in result.table
            )
            summary_rows.append({"model": model, "m0": m0, "alpha": result.alpha, "intercept": result.intercept})
            logger.info("%s m0=%d: alpha=%.4f", model, m0, result.alpha)
    rec.write_csv("scaling.csv", ["model", "m0", "n", "mean_expected_time"], table_rows)
    rec.write_csv("scaling_summary.csv", ["model", "m0", "alpha", "intercept"], summary_rows)


def run_degree_law(cfg: ExperimentConfig, rec: _Recorder) -> None:
    """
    Compare pooled BA degrees with the degree pmf and the derived weights with
    the proposed expected-degree density
    """
    rows = []
    for n, m0 in cfg.cells:
        seeds = rec.trial_seeds(n, m0, BA_KEY, "ba")
        pooled = np.concatenate(
            map_ordered(_ba_degrees, [n] * len(seeds), [m0] * len(seeds), seeds, workers=cfg.workers)
        )
        rows.append({"n": n, "m0": m0, "law": "pmf", "sample": "ba_degrees",
                     "distance": histogram_compare(pooled, "pmf", m0)})
        weights = cached_weights(cfg, n, m0)
        rows.append({"n": n, "m0": m0, "law": "density", "sample": "derived_weights",
                     "distance": histogram_compare(weights, "density", m0)})
    rec.write_csv("degree_law.csv", ["n", "m0", "law", "sample", "distance"], rows)


RUNNERS = {
    "spectral-bulk": run_spectral_bulk,
    "extreme-eigs": run_extreme_eigs,
    "principal-vec": run_principal_vec,
    "ctqw-search": run_ctqw,
    "scaling": run_scaling,
    "derive-weights": run_derive_weights,
    "degree-law": run_degree_law,
}


def run_experiment(cfg: ExperimentConfig) -> RunManifest:
    """
    Run one experiment and write its CSV tables and manifest.json

    Args:
        cfg (ExperimentConfig): Settings

    Returns:
        RunManifest: The manifest written next to the tables

    Raises:
        ConfigError: On invalid settings; library errors propagate
    """
    from . import __version__

    cfg.validate()
    rec = _Recorder(cfg)
    manifest = RunManifest(
        config=asdict(cfg), master_seed=cfg.seed, trial_seeds=rec.seeds, tool_version=__version__, started=_now()
    )
    logger.info("running %s over %d cells", cfg.experiment, len(cfg.cells))
    RUNNERS[cfg.experiment](cfg, rec)
    manifest.finished = _now()
    manifest.outputs = list(rec.outputs)
    (rec.out_dir / "manifest.json").write_text(json.dumps(asdict(manifest), indent=2) + "\n", encoding="utf-8")
    return manifest


def load_manifest(path) -> ExperimentConfig:
    """
    Rebuild the ExperimentConfig recorded in a manifest

    Args:
        path: manifest.json written by run_experiment

    Returns:
        ExperimentConfig: Settings that reproduce the run
    """
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return ExperimentConfig.from_mapping(data["config"])
