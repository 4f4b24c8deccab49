"""Command line entry point: ``needlet <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import cubature, experiments
from .estimator import EstimatorConfig, estimate_density, pilot_bound
from .frame import load_pyramid, save_pyramid, synthesize
from .models import MODELS_BY_NAME, Sample, sample_model
from .window import build_window


def write_sample(sample: Sample, path) -> None:
    np.savetxt(path, sample.points, delimiter=",", fmt="%.17g", header="x,y,z", comments="")


def read_sample(path) -> Sample:
    with open(path) as fh:
        header = fh.readline().strip().replace(" ", "")
    if header != "x,y,z":
        raise ValueError(f"{path}: expected header 'x,y,z'")
    pts = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return Sample(pts, {"source": str(path)})


def cmd_grid(args):
    rule = cubature.build_rule(args.j, args.scheme)
    cubature.save_rule(rule, args.out)
    print(f"wrote {len(rule)} nodes (degree {rule.exact_degree}) to {args.out}")


def cmd_sample(args):
    sample = sample_model(MODELS_BY_NAME[args.model], args.n, args.seed, args.replicate)
    write_sample(sample, args.out)
    print(f"wrote {sample.n} points to {args.out}")


def cmd_estimate(args):
    window = build_window()
    sample = read_sample(args.sample)
    M = args.m if args.m is not None else pilot_bound(sample, window, args.j, args.scheme)
    cfg = EstimatorConfig.for_sample_size(sample.n, args.k0, M, J=args.j, scheme=args.scheme)
    est, pyramid = estimate_density(sample, cfg, window)
    save_pyramid(pyramid, args.out)
    record = {"n": sample.n, "J": cfg.J, "kappa": cfg.kappa, "k0": cfg.k0, "M": M,
              "threshold": cfg.threshold, "survivors": est.survivors,
              "total": pyramid.counts(), "l2_proxy": est.l2_proxy()}
    if args.metrics:
        Path(args.metrics).write_text(json.dumps(record, indent=2) + "\n")
    print(json.dumps(record))


def cmd_eval(args):
    window = build_window()
    pyramid = load_pyramid(args.coeffs)
    theta, phi, pts = experiments.lattice(experiments.parse_lattice(args.lattice))
    vals = synthesize(pyramid, pts, window, method="harmonic")
    np.savetxt(args.out, np.column_stack([theta, phi, vals]), delimiter=",", fmt="%.17g",
               header="theta,phi,fhat", comments="")
    print(f"wrote {len(vals)} lattice values to {args.out}")


def cmd_experiment(args):
    cfg = experiments.read_config(args.config) if args.config else {}
    out = Path(args.out_dir)
    if args.kind == "rates":
        spec = experiments.spec_from_config("rates", cfg)
        res = experiments.run_rate_sweep(spec.model, spec.n, spec.replicates, spec.seed,
                                         spec.k0[0], spec.M, spec.scheme, out_dir=out)
        print(json.dumps({"n": list(res.n_list), "mean_l2": res.mean_errors(), "slope": res.slope}))
        return
    spec = experiments.spec_from_config(args.kind, cfg, out)
    if args.kind == "uniform":
        res = experiments.run_uniform_experiment(spec, error_metrics=True)
        print(json.dumps(res.metrics))
    else:
        res = experiments.run_twobump_experiment(spec)
        print(json.dumps({"f_sup": res.f_sup, "runs": res.runs}))


def cmd_window(args):
    build_window().dump_csv(args.out)
    print(f"wrote window table to {args.out}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="needlet", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("grid", help="cubature grids")
    gsub = g.add_subparsers(dest="action", required=True)
    gb = gsub.add_parser("build")
    gb.add_argument("--j", type=int, required=True)
    gb.add_argument("--scheme", choices=cubature.SCHEMES, default="spiral")
    gb.add_argument("--out", required=True)
    gb.set_defaults(func=cmd_grid)

    s = sub.add_parser("sample", help="draw a sample")
    s.add_argument("--model", choices=sorted(MODELS_BY_NAME), required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--replicate", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sample)

    e = sub.add_parser("estimate", help="thresholded needlet estimate from a sample CSV")
    e.add_argument("--sample", required=True)
    e.add_argument("--j", type=int, default=None, help="highest level (default from n)")
    e.add_argument("--k0", type=float, default=1.65)
    e.add_argument("--m", type=float, default=None, help="bound on ||f||_inf (default: pilot)")
    e.add_argument("--scheme", choices=cubature.SCHEMES, default="spiral")
    e.add_argument("--metrics", default=None, help="optional JSON metrics path")
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_estimate)

    v = sub.add_parser("eval", help="evaluate a coefficient file on a lattice")
    v.add_argument("--coeffs", required=True)
    v.add_argument("--lattice", default="256x512")
    v.add_argument("--out", required=True)
    v.set_defaults(func=cmd_eval)

    x = sub.add_parser("experiment", help="simulation studies")
    x.add_argument("kind", choices=["uniform", "twobump", "rates"])
    x.add_argument("--config", default=None)
    x.add_argument("--out-dir", required=True)
    x.set_defaults(func=cmd_experiment)

    w = sub.add_parser("window", help="dump xi, phi(xi), b(xi)")
    w.add_argument("--out", required=True)
    w.set_defaults(func=cmd_window)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
