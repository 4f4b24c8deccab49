"""Convergence-rate sweep on the two-bump mixture.

    python scripts/run_rates.py --out-dir runs/rates [--replicates 10] [--seed 0]

Prints the mean L2 error per sample size and the log-log slope.
"""

import argparse
import logging
from pathlib import Path

from needlet_density.experiments import run_rate_sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", type=Path, default=Path("runs/rates"))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--replicates", type=int, default=10)
    ap.add_argument("--n", type=int, nargs="+", default=[500, 2000, 8000, 32000])
    ap.add_argument("--k0", type=float, default=1.65)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    res = run_rate_sweep(n_list=tuple(args.n), replicates=args.replicates, seed=args.seed,
                         k0=args.k0, out_dir=args.out_dir)
    for n, e in zip(res.n_list, res.mean_errors()):
        print(f"n={n:<6} mean L2 error {e:.4f}")
    print(f"slope {res.slope:.3f}")


if __name__ == "__main__":
    main()
