"""
Desk-scale reproduction of the BA / Chung-Lu experiments

Runs every experiment of the harness at a reduced scale (a few hundred
vertices, tens of trials) and prints a short report of the headline numbers.

Usage:
    python scripts/desk_reproduction.py [out_dir] [workers]

Features:
    - Chung-Lu weight derivation with an on-disk cache shared by all steps
    - Bulk spectra, extreme eigenvalues and principal vectors
    - Optimal measurement times and the search time scaling exponent
    - Degree law comparison
"""

import csv
import os
import sys
import time
from typing import Dict, List

import numpy as np

# Add src directory to path for imports
sys.path.append(os.path.join(os.path.dirname(__file__), "..", "src"))

from bacl_spectra import BaclError, ExperimentConfig, run_experiment

DESK_STEPS = [
    ("derive-weights", dict(m0_list=[1, 2, 5], order_list=[400])),
    ("spectral-bulk", dict(m0_list=[1, 2, 5], order_list=[400], trials=50)),
    ("extreme-eigs", dict(m0_list=[4], order_list=[400], trials=50)),
    ("principal-vec", dict(m0_list=[4], order_list=[400], trials=20)),
    ("ctqw-search", dict(m0_list=[4], order_list=[400], trials=10)),
    ("scaling", dict(m0_list=[6], order_list=[256, 512, 1024], trials=5)),
    ("degree-law", dict(m0_list=[4], order_list=[400], trials=20)),
]


def read_rows(path: str) -> List[Dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def report(experiment: str, out_dir: str) -> None:
    """
    Print the headline numbers of one experiment

    Args:
        experiment (str): Experiment name
        out_dir (str): Directory holding its CSV tables
    """
    if experiment == "spectral-bulk":
        rows = read_rows(os.path.join(out_dir, "spectral_bulk.csv"))
        for m0 in sorted({int(r["m0"]) for r in rows}):
            p = [float(r["p_value"]) for r in rows if int(r["m0"]) == m0]
            print(f"   m0={m0}: median KS p-value {np.median(p):.3f}")
    elif experiment == "extreme-eigs":
        for r in read_rows(os.path.join(out_dir, "extreme_eigs.csv")):
            print(
                f"   {r['which']:>6}: mean BA {float(r['mean_ba']):.3f}, mean CL {float(r['mean_cl']):.3f}, "
                f"p {float(r['p_value_standardized']):.3f}"
            )
    elif experiment == "principal-vec":
        rows = [r for r in read_rows(os.path.join(out_dir, "principal_vec.csv")) if not r["flag"]]
        print(f"   mean half-Euclidean distance {np.mean([float(r['euclid_half']) for r in rows]):.3f}")
        print(f"   mean uniform distance {np.mean([float(r['inf_norm']) for r in rows]):.4f}")
    elif experiment == "ctqw-search":
        rows = read_rows(os.path.join(out_dir, "ctqw_optimal.csv"))
        for model in ("ba", "cl"):
            for node in sorted({int(r["marked"]) for r in rows}):
                t = [float(r["t_opt"]) for r in rows if r["model"] == model and int(r["marked"]) == node]
                print(f"   {model.upper()} marked {node}: mean t_opt {np.mean(t):.2f}")
    elif experiment == "scaling":
        for r in read_rows(os.path.join(out_dir, "scaling_summary.csv")):
            print(f"   {r['model'].upper()} m0={r['m0']}: alpha = {float(r['alpha']):.3f}")
    elif experiment == "degree-law":
        for r in read_rows(os.path.join(out_dir, "degree_law.csv")):
            print(f"   {r['sample']} vs {r['law']}: sup CDF distance {float(r['distance']):.4f}")
    elif experiment == "derive-weights":
        for r in read_rows(os.path.join(out_dir, "derive_weights.csv")):
            print(f"   n={r['n']} m0={r['m0']}: {r['rounds']} rounds, sum w = {float(r['sum_w']):.1f}")


def run_step(experiment: str, settings: Dict, root: str, workers: int) -> bool:
    """
    Run one experiment into root/<experiment>

    Returns:
        bool: True on success
    """
    out_dir = os.path.join(root, experiment)
    cfg = ExperimentConfig(
        experiment=experiment, out_dir=out_dir, cache_dir=os.path.join(root, "weights"), workers=workers, **settings
    )
    print(f"\n🔄 {experiment} (orders {cfg.order_list}, m0 {cfg.m0_list})")
    start = time.time()
    try:
        run_experiment(cfg)
    except BaclError as e:
        print(f"❌ {experiment} failed: {e.to_record()}")
        return False
    print(f"✅ Finished in {time.time() - start:.1f}s, tables in {out_dir}")
    report(experiment, out_dir)
    return True


def main():
    """Main function"""
    root = sys.argv[1] if len(sys.argv) > 1 else "desk_results"
    workers = int(sys.argv[2]) if len(sys.argv) > 2 else 1

    print("=" * 60)
    print("🧪 BA / CHUNG-LU DESK REPRODUCTION")
    print("=" * 60)
    print(f"Output directory: {root}, workers: {workers}")

    try:
        results = [run_step(name, settings, root, workers) for name, settings in DESK_STEPS]
    except KeyboardInterrupt:
        print("\n🛑 Reproduction cancelled by user")
        return

    print("\n" + "=" * 60)
    if all(results):
        print("🎉 ALL EXPERIMENTS COMPLETED")
    else:
        print(f"⚠️ {results.count(False)} of {len(results)} experiments failed")
    print("=" * 60)


if __name__ == "__main__":
    main()
