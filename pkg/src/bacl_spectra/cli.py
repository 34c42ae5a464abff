"""
Command line interface

Usage:
    bacl generate --model ba --n 1000 --m0 4 --seed 1 --out graph.txt
    bacl derive-weights --n 1000 --m0 4 --eps 0.05 --batch 300 --out w.csv
    bacl spectrum --in graph.txt --mode extreme --out eigs.csv
    bacl ctqw-search --model cl --weights w.csv --marked 7 --tmax 15 --out p.csv
    bacl degree-law --m0 4 --law density --sample w.csv
    bacl spectral-bulk --m0 1 2 5 --orders 400 --trials 50 --out results/bulk
    bacl run --config results/bulk/manifest.json --workers 4

Every option can also be given in a JSON file passed with ``--config``; its
keys are the flag names. Flags given on the command line win over the file.
On failure a JSON error record is printed on stderr and the exit status is 1.
"""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .config import check_known, load_config
from .ctqw import (
    BACKENDS,
    RULES,
    EvolutionConfig,
    choose_measurement,
    sample_graph,
    search_operator,
    success_probabilities,
    uniform_time_grid,
)
from .errors import BaclError, ConfigError
from .generators import generate_ba, generate_cl
from .graph import dump_edge_list, load_edge_list
from .harness import EXPERIMENTS, PLATEAU_TMAX, REFERENCES, ExperimentConfig, run_experiment
from .models import LAWS, histogram_compare
from .spectra import METHODS, summarize
from .weights import DerivationConfig, derive_weights, load_weights, save_weights

logger = logging.getLogger(__name__)

# Flag names that differ from ExperimentConfig fields
EXPERIMENT_ALIASES = {"m0": "m0_list", "orders": "order_list", "eps": "epsilon", "out": "out_dir"}

# Experiments exposed as their own verb; the rest run through ``run``
EXPERIMENT_VERBS = ("spectral-bulk", "extreme-eigs", "principal-vec", "scaling")

_RESERVED = {"command", "handler", "config", "verbose"}


def _require(settings: Dict[str, Any], key: str) -> Any:
    if settings.get(key) is None:
        raise ConfigError(f"missing required setting --{key.replace('_', '-')}", setting=key)
    return settings[key]


def _write_rows(path: Path, fieldnames: Sequence[str], rows: List[Dict[str, Any]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(fieldnames), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def _load_weight_setting(settings: Dict[str, Any]) -> Optional[np.ndarray]:
    path = settings.get("weights")
    return load_weights(path) if path else None


# Verb handlers


def cmd_generate(settings: Dict[str, Any]) -> int:
    model = settings.get("model", "ba")
    seed = settings.get("seed", 0)
    if model == "cl":
        weights = _load_weight_setting(settings)
        if weights is None:
            raise ConfigError("Chung-Lu generation needs --weights", setting="weights")
        graph = generate_cl(weights, seed)
    else:
        graph = generate_ba(_require(settings, "n"), _require(settings, "m0"), seed)
    out = Path(settings.get("out", "graph.txt"))
    dump_edge_list(graph, out)
    print(f"✅ {model.upper()} graph with n={graph.n}, {graph.edge_count} edges written to {out}")
    return 0


def cmd_derive_weights(settings: Dict[str, Any]) -> int:
    cfg = DerivationConfig(
        n=_require(settings, "n"),
        m0=_require(settings, "m0"),
        batch=settings.get("batch", 300),
        epsilon=settings.get("eps", 0.05),
        seed=settings.get("seed", 0),
        max_rounds=settings.get("max_rounds", 200),
        workers=settings.get("workers", 1),
    )
    print(f"🔄 Deriving weights for n={cfg.n}, m0={cfg.m0} (batch {cfg.batch}, eps {cfg.epsilon})")
    result = derive_weights(cfg)
    out = Path(settings.get("out", "w.csv"))
    save_weights(out, result.w_bar)
    print(f"✅ Converged after {result.rounds} rounds, last sup delta {result.sup_deltas[-1]:.5f}")
    print(f"📁 Weights written to {out}")
    return 0


def cmd_spectrum(settings: Dict[str, Any]) -> int:
    graph = load_edge_list(_require(settings, "input"))
    mode = settings.get("mode", "full")
    summary = summarize(graph, mode=mode, method=settings.get("method", "auto"))
    out = Path(settings.get("out", "spectrum.csv"))
    if mode == "full":
        rows = [{"index": i, "eigenvalue": repr(float(v))} for i, v in enumerate(summary.eigenvalues)]
        _write_rows(out, ["index", "eigenvalue"], rows)
    elif mode == "extreme":
        rows = [
            {"which": which, "eigenvalue": repr(float(v))}
            for which, v in zip(("first", "second", "last"), summary.eigenvalues)
        ]
        _write_rows(out, ["which", "eigenvalue"], rows)
    else:
        rows = [{"vertex_id": i, "value": repr(float(v))} for i, v in enumerate(summary.principal)]
        _write_rows(out, ["vertex_id", "value"], rows)
    print(f"✅ {mode} spectrum of n={graph.n} written to {out}")
    return 0


def cmd_ctqw_search(settings: Dict[str, Any]) -> int:
    model = settings.get("model", "ba")
    weights = _load_weight_setting(settings)
    m0 = settings.get("m0")
    if model == "cl":
        if weights is None:
            raise ConfigError("Chung-Lu search needs --weights", setting="weights")
        n = len(weights)
    else:
        n = _require(settings, "n")
        m0 = _require(settings, "m0")
    marked = settings.get("marked")
    if marked is None:
        marked = _require(settings, "m0") + 1
    tmax = settings.get("tmax", PLATEAU_TMAX.get(marked, 15.0))
    times = uniform_time_grid(tmax, settings.get("dt", 0.1))

    graph = sample_graph(model, n, m0 or 1, settings.get("seed", 0), weights)
    cfg = EvolutionConfig(backend=settings.get("backend", "auto"))
    # marked node indices are 1-based
    run = success_probabilities(search_operator(graph, marked - 1), times, cfg)
    choose_measurement(run, settings.get("rule", "plateau"), settings.get("rel_tol", 0.2), settings.get("coeff", 0.1))

    out = Path(settings.get("out", "ctqw.csv"))
    _write_rows(out, ["t", "p"], [{"t": repr(float(t)), "p": repr(float(p))} for t, p in zip(run.times, run.probs)])
    summary = out.with_name(f"{out.stem}_summary{out.suffix or '.csv'}")
    _write_rows(
        summary,
        ["t_opt", "p_opt", "expected_time"],
        [{"t_opt": repr(run.t_opt), "p_opt": repr(run.p_opt), "expected_time": repr(run.expected_time)}],
    )
    print(f"✅ t_opt={run.t_opt:.2f}, p_opt={run.p_opt:.4f}, expected time {run.expected_time:.3f}")
    print(f"📁 Probabilities in {out}, summary in {summary}")
    return 0


def _read_sample(path: str, column: Optional[str]) -> np.ndarray:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not reader.fieldnames:
            raise ConfigError(f"sample file {path} has no header", path=path)
        column = column or reader.fieldnames[-1]
        if column not in reader.fieldnames:
            raise ConfigError(f"column {column!r} not in {path}", columns=list(reader.fieldnames))
        return np.asarray([float(row[column]) for row in reader], dtype=np.float64)


def cmd_degree_law(settings: Dict[str, Any]) -> int:
    m0 = _require(settings, "m0")
    law = settings.get("law", "pmf")
    sample = _read_sample(_require(settings, "sample"), settings.get("column"))
    distance = histogram_compare(sample, law, m0)
    print(f"📊 sup CDF distance to the {law} law (m0={m0}, {sample.size} values): {distance:.5f}")
    if settings.get("out"):
        _write_rows(
            Path(settings["out"]),
            ["m0", "law", "size", "distance"],
            [{"m0": m0, "law": law, "size": sample.size, "distance": repr(distance)}],
        )
    return 0


def experiment_config(settings: Dict[str, Any], experiment: Optional[str] = None) -> ExperimentConfig:
    """
    Turn merged flag/config-file settings into an ExperimentConfig

    Args:
        settings (dict): Settings keyed by flag name or field name
        experiment (str, optional): Experiment forced by the verb

    Returns:
        ExperimentConfig: Validated settings
    """
    values = {EXPERIMENT_ALIASES.get(key, key): value for key, value in settings.items()}
    if experiment is not None:
        values["experiment"] = experiment
    if "experiment" not in values:
        raise ConfigError("no experiment given (use --experiment or a config file)")
    cfg = ExperimentConfig.from_mapping(values)
    cfg.validate()
    return cfg


def _experiment_handler(experiment: Optional[str]) -> Callable[[Dict[str, Any]], int]:
    def handler(settings: Dict[str, Any]) -> int:
        cfg = experiment_config(settings, experiment)
        print(f"🚀 {cfg.experiment}: orders {cfg.order_list}, m0 {cfg.m0_list}, {cfg.trials} trials, seed {cfg.seed}")
        manifest = run_experiment(cfg)
        for name in manifest.outputs:
            print(f"📁 {Path(cfg.out_dir) / name}")
        print(f"✅ Done, manifest in {Path(cfg.out_dir) / 'manifest.json'}")
        return 0

    return handler


# Parser


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, help="master seed (default 0)")
    common.add_argument("--workers", type=int, help="worker processes (default 1)")
    common.add_argument("--out", help="output file or directory")
    common.add_argument("--config", help="JSON config file or run manifest")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    return common


def _add_experiment_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--m0", type=int, nargs="+", help="BA parameters")
    sub.add_argument("--orders", type=int, nargs="+", help="ascending graph orders")
    sub.add_argument("--trials", type=int, help="graphs (pairs) per model and cell")
    sub.add_argument("--eps", type=float, help="weight derivation tolerance")
    sub.add_argument("--batch", type=int, help="weight derivation batch size")
    sub.add_argument("--max-rounds", type=int, help="weight derivation round cap")
    sub.add_argument("--cache-dir", help="weight cache directory")
    sub.add_argument("--reference", choices=REFERENCES, help="second ensemble")
    sub.add_argument("--method", choices=METHODS, help="eigensolver")
    sub.add_argument("--marked", type=int, nargs="+", help="1-based marked node indices")
    sub.add_argument("--tmax", type=float, help="plateau grid length")
    sub.add_argument("--dt", type=float, help="plateau grid step")
    sub.add_argument("--rule", choices=RULES, help="optimal time rule")
    sub.add_argument("--rel-tol", type=float, help="plateau margin")
    sub.add_argument("--coeff", type=float, help="expected time overhead coefficient")
    sub.add_argument("--backend", choices=BACKENDS, help="evolution backend")


def build_parser() -> argparse.ArgumentParser:
    """Build the ``bacl`` argument parser"""
    parser = argparse.ArgumentParser(prog="bacl", description="BA / Chung-Lu spectra and quantum search")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    common = _common_parser()

    def verb(name: str, handler, help_text: str) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(
            name, parents=[common], help=help_text, argument_default=argparse.SUPPRESS
        )
        sub.set_defaults(handler=handler)
        return sub

    sub = verb("generate", cmd_generate, "sample one BA or CL graph as an edge list")
    sub.add_argument("--model", choices=("ba", "cl"))
    sub.add_argument("--n", type=int)
    sub.add_argument("--m0", type=int)
    sub.add_argument("--weights", help="weight CSV for --model cl")

    sub = verb("derive-weights", cmd_derive_weights, "derive Chung-Lu weights from BA samples")
    sub.add_argument("--n", type=int)
    sub.add_argument("--m0", type=int)
    sub.add_argument("--eps", type=float)
    sub.add_argument("--batch", type=int)
    sub.add_argument("--max-rounds", type=int)

    sub = verb("spectrum", cmd_spectrum, "spectrum of an edge-list graph")
    sub.add_argument("--in", dest="input")
    sub.add_argument("--mode", choices=("full", "extreme", "principal"))
    sub.add_argument("--method", choices=METHODS)

    sub = verb("ctqw-search", cmd_ctqw_search, "quantum search on one sampled graph")
    sub.add_argument("--model", choices=("ba", "cl"))
    sub.add_argument("--n", type=int)
    sub.add_argument("--m0", type=int)
    sub.add_argument("--weights", help="weight CSV for --model cl")
    sub.add_argument("--marked", type=int, help="1-based marked node index (default m0 + 1)")
    sub.add_argument("--tmax", type=float)
    sub.add_argument("--dt", type=float)
    sub.add_argument("--rule", choices=RULES)
    sub.add_argument("--rel-tol", type=float)
    sub.add_argument("--coeff", type=float)
    sub.add_argument("--backend", choices=BACKENDS)

    sub = verb("degree-law", cmd_degree_law, "compare a sample with a BA degree law")
    sub.add_argument("--m0", type=int)
    sub.add_argument("--law", choices=LAWS)
    sub.add_argument("--sample", help="CSV file holding the sample")
    sub.add_argument("--column", help="sample column (default: last)")

    for name in EXPERIMENT_VERBS:
        _add_experiment_options(verb(name, _experiment_handler(name), f"{name} experiment"))

    sub = verb("run", _experiment_handler(None), "run any experiment, e.g. from a manifest")
    sub.add_argument("--experiment", choices=EXPERIMENTS)
    _add_experiment_options(sub)
    return parser


def _option_names(parser: argparse.ArgumentParser, command: str) -> List[str]:
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    return [action.dest for action in subparsers.choices[command]._actions]


def resolve_settings(parser: argparse.ArgumentParser, args: argparse.Namespace) -> Dict[str, Any]:
    """
    Merge config file values with the flags given on the command line

    Raises:
        ConfigError: On unknown keys in the config file
    """
    flags = {key: value for key, value in vars(args).items() if key not in _RESERVED}
    if not getattr(args, "config", None):
        return flags
    settings = load_config(args.config)
    if "in" in settings:
        settings["input"] = settings.pop("in")
    if args.command in EXPERIMENT_VERBS or args.command == "run":
        allowed = set(_option_names(parser, args.command)) | set(EXPERIMENT_ALIASES.values())
        allowed |= set(ExperimentConfig.__dataclass_fields__)
    else:
        allowed = set(_option_names(parser, args.command))
    check_known(settings, allowed - _RESERVED, args.command)
    settings.update(flags)
    return settings


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point of the ``bacl`` command

    Returns:
        int: Exit status, 0 on success and 1 on error
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    try:
        return args.handler(resolve_settings(parser, args))
    except BaclError as e:
        print(json.dumps(e.to_record()), file=sys.stderr)
    except OSError as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
