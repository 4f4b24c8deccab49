"""Survival tables for the uniform density (n = 2000 and 8000, k0 in {1, 1.5, 2}).

    python scripts/run_uniform_tables.py --out-dir runs/uniform [--seed 0]

Writes one CSV per sample size plus uniform_metrics.json and prints the
surviving fractions level by level.
"""

import argparse
from pathlib import Path

from needlet_density.experiments import ExperimentSpec, run_uniform_experiment
from needlet_density.models import UNIFORM


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", type=Path, default=Path("runs/uniform"))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n", type=int, nargs="+", default=[2000, 8000])
    ap.add_argument("--k0", type=float, nargs="+", default=[1.0, 1.5, 2.0])
    args = ap.parse_args()

    spec = ExperimentSpec(UNIFORM, n=args.n, k0=args.k0, seed=args.seed, out_dir=args.out_dir)
    res = run_uniform_experiment(spec, error_metrics=True)
    for n in spec.n:
        print(f"n = {n}")
        for k0 in spec.k0:
            fr = "  ".join(f"{f:.3f}" for f in res.fractions(n, k0))
            print(f"  k0={k0:<4g} fractions {fr}   L2 proxy {res.proxy(n, k0):.4f}")
    print(f"artifacts in {args.out_dir}")


if __name__ == "__main__":
    main()
