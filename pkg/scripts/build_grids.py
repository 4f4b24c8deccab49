"""Regenerate the packaged spiral cubature grids (levels 0..5).

    python scripts/build_grids.py [--max-level 5]

Level 5 needs roughly 3 minutes and 2.5 GB of memory.
"""

import argparse
import time
from pathlib import Path

import numpy as np

from needlet_density import cubature

DATA = Path(__file__).resolve().parents[1] / "src" / "needlet_density" / "data"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-level", type=int, default=cubature.MAX_LEVEL["spiral"])
    args = ap.parse_args()
    DATA.mkdir(parents=True, exist_ok=True)
    for j in range(args.max_level + 1):
        t0 = time.time()
        rule = cubature.solve_spiral_rule(j)
        out = DATA / f"spiral_j{j}.grid"
        cubature.save_rule(rule, out)
        w = rule.weights * len(rule) / (4 * np.pi)
        print(f"j={j} N={len(rule)} degree={rule.exact_degree} "
              f"weights/mean in [{w.min():.3f}, {w.max():.3f}] ({time.time() - t0:.1f}s) -> {out.name}")


if __name__ == "__main__":
    main()
