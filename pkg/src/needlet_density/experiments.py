"""Simulation studies: uniform-density survival tables, the two-bump mixture,
and convergence-rate sweeps.  Everything is a pure function of the ExperimentSpec and
its seed; artifacts are CSV/JSON only."""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cubature import integrate, product_rule
from .estimator import (DensityEstimate, EstimatorConfig, default_J, empirical_coefficients,
                        estimate_density)
from .frame import default_rules
from .models import MODELS_BY_NAME, TWO_BUMP, UNIFORM, DensityModel, density_eval, sample_model
from .sphere import FOUR_PI, from_angles
from .window import WindowFunction, build_window

log = logging.getLogger(__name__)

LATTICE_SHAPE = (256, 512)
# L^2 errors use a product rule exact to degree 254; f_hat has degree <= 63
ERROR_RULE_DEGREE = 254


def lattice(shape=LATTICE_SHAPE) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Colatitude cell centres x equispaced longitudes; returns ``theta, phi, points``."""
    n_theta, n_phi = shape
    theta = (np.arange(n_theta) + 0.5) * np.pi / n_theta
    phi = np.arange(n_phi) * 2 * np.pi / n_phi
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    return tt.ravel(), pp.ravel(), from_angles(tt, pp).reshape(-1, 3)


def parse_lattice(text: str) -> tuple[int, int]:
    a, _, b = text.lower().partition("x")
    return int(a), int(b)


def model_sup(model: DensityModel, shape=LATTICE_SHAPE) -> float:
    return float(np.max(density_eval(model, lattice(shape)[2])))


@dataclass
class ExperimentSpec:
    model: DensityModel = UNIFORM
    n: tuple = (2000,)
    k0: tuple = (1.0, 1.5, 2.0)
    J: int | None = None
    seed: int = 0
    replicates: int = 1
    M: float | None = None
    scheme: str = "spiral"
    out_dir: Path | None = None
    emit_lattice: bool = True

    def __post_init__(self):
        self.n = tuple(int(v) for v in np.atleast_1d(self.n))
        self.k0 = tuple(float(v) for v in np.atleast_1d(self.k0))
        if min(self.n) < 1 or self.replicates < 1:
            raise ValueError("n and replicates must be >= 1")
        if self.out_dir is not None:
            self.out_dir = Path(self.out_dir)

    def bound(self) -> float:
        return self.M if self.M is not None else model_sup(self.model)

    def level(self, n: int) -> int:
        return self.J if self.J is not None else default_J(n, self.scheme)


def read_config(path) -> dict:
    """``key = value`` lines; comma-separated values become tuples."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            items = [_scalar(v.strip().strip('"')) for v in val.split(",") if v.strip()]
            out[key.strip()] = items[0] if len(items) == 1 else tuple(items)
    return out


def _scalar(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def spec_from_config(kind: str, cfg: dict, out_dir=None) -> ExperimentSpec:
    model = MODELS_BY_NAME[cfg.get("model", "uniform" if kind == "uniform" else "twobump")]
    defaults = {"uniform": ((2000, 8000), (1.0, 1.5, 2.0)),
                "twobump": ((2000, 8000), (1.1, 1.65)),
                "rates": ((500, 2000, 8000, 32000), (1.65,))}[kind]
    return ExperimentSpec(
        model=model,
        n=cfg.get("n", defaults[0]),
        k0=cfg.get("k0", defaults[1]),
        J=cfg.get("J"),
        seed=int(cfg.get("seed", 0)),
        replicates=int(cfg.get("replicates", 10 if kind == "rates" else 1)),
        M=cfg.get("M"),
        scheme=str(cfg.get("scheme", "spiral")),
        out_dir=out_dir,
        emit_lattice=bool(cfg.get("emit_lattice", 1)),
    )


def _write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def metrics_record(n, est: DensityEstimate, seed, linf=None, l2=None, l2_proxy=None) -> dict:
    cfg = est.config
    return {"n": n, "J": cfg.J, "kappa": cfg.kappa, "k0": cfg.k0, "seed": seed,
            "survivors": list(est.survivors), "linf": linf, "l2": l2, "l2_proxy": l2_proxy}


@dataclass
class UniformResult:
    rows: list = field(default_factory=list)       # (n, k0, j, survivors, total, fraction)
    metrics: list = field(default_factory=list)

    def fractions(self, n: int, k0: float) -> list[float]:
        return [r[5] for r in self.rows if r[0] == n and r[1] == k0]

    def proxy(self, n: int, k0: float) -> float:
        return next(m["l2_proxy"] for m in self.metrics if m["n"] == n and m["k0"] == k0)


def run_uniform_experiment(spec: ExperimentSpec, window: WindowFunction | None = None,
                           error_metrics: bool = False) -> UniformResult:
    """Count coefficients surviving thresholding when the truth is uniform."""
    window = window or build_window()
    M = spec.M if spec.M is not None else 1.0 / FOUR_PI
    res = UniformResult()
    err_rule = product_rule(ERROR_RULE_DEGREE) if error_metrics else None
    for n in spec.n:
        J = spec.level(n)
        rules = default_rules(J, spec.scheme)
        sample = sample_model(UNIFORM, n, spec.seed)
        raw = empirical_coefficients(sample, J, window, rules)
        for k0 in spec.k0:
            cfg = EstimatorConfig.for_sample_size(n, k0, M, J=J, scheme=spec.scheme)
            est, _ = estimate_density(sample, cfg, window, rules, raw=raw)
            for j, (s, rule) in enumerate(zip(est.survivors, rules)):
                res.rows.append((n, k0, j, s, len(rule), s / len(rule)))
            linf = l2 = None
            if err_rule is not None:
                diff = est(err_rule.nodes) - 1.0 / FOUR_PI
                linf = float(np.abs(diff).max())
                l2 = math.sqrt(integrate(err_rule, diff**2))
            res.metrics.append(metrics_record(n, est, spec.seed, linf, l2, est.l2_proxy()))
    if spec.out_dir is not None:
        for n in spec.n:
            _write_csv(spec.out_dir / f"uniform_n{n}_table.csv",
                       ["k0", "j", "survivors", "total", "fraction"],
                       [r[1:] for r in res.rows if r[0] == n])
        _write_json(spec.out_dir / "uniform_metrics.json", res.metrics)
    return res


@dataclass
class TwoBumpResult:
    f_sup: float
    runs: list = field(default_factory=list)   # metrics records

    def run(self, n: int, k0: float) -> dict:
        return next(r for r in self.runs if r["n"] == n and r["k0"] == k0)


def run_twobump_experiment(spec: ExperimentSpec, window: WindowFunction | None = None
                           ) -> TwoBumpResult:
    """Estimate the two-bump mixture and measure the sup error on the lattice."""
    window = window or build_window()
    theta, phi, pts = lattice()
    truth = density_eval(spec.model, pts)
    res = TwoBumpResult(float(truth.max()))
    M = spec.M if spec.M is not None else res.f_sup
    err_rule = product_rule(ERROR_RULE_DEGREE)
    truth_rule = density_eval(spec.model, err_rule.nodes)
    for n in spec.n:
        J = spec.level(n)
        rules = default_rules(J, spec.scheme)
        sample = sample_model(spec.model, n, spec.seed)
        raw = empirical_coefficients(sample, J, window, rules)
        for k0 in spec.k0:
            cfg = EstimatorConfig.for_sample_size(n, k0, M, J=J, scheme=spec.scheme)
            est, _ = estimate_density(sample, cfg, window, rules, raw=raw)
            fhat = est(pts, method="harmonic")
            l2 = math.sqrt(integrate(err_rule, (est(err_rule.nodes) - truth_rule) ** 2))
            rec = metrics_record(n, est, spec.seed, float(np.abs(fhat - truth).max()), l2)
            res.runs.append(rec)
            if spec.out_dir is not None and spec.emit_lattice:
                _write_lattice(spec.out_dir / f"twobump_n{n}_k{k0:g}.csv", theta, phi, truth, fhat)
    if spec.out_dir is not None:
        rows = []
        for r in res.runs:
            totals = [len(rule) for rule in default_rules(r["J"], spec.scheme)]
            rows += [(r["n"], r["k0"], j, s, t, s / t)
                     for j, (s, t) in enumerate(zip(r["survivors"], totals))]
        _write_csv(spec.out_dir / "twobump_survivors.csv",
                   ["n", "k0", "j", "survivors", "total", "fraction"], rows)
        _write_json(spec.out_dir / "twobump_metrics.json", {"f_sup": res.f_sup, "runs": res.runs})
    return res


def _write_lattice(path: Path, theta, phi, f, fhat) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.column_stack([theta, phi, f, fhat]), delimiter=",", fmt="%.17g",
               header="theta,phi,f,fhat", comments="")


@dataclass
class RateResult:
    n_list: tuple
    errors: dict            # n -> list of per-replicate L^2 errors
    slope: float

    def mean_errors(self) -> list[float]:
        return [float(np.mean(self.errors[n])) for n in self.n_list]


def run_rate_sweep(model: DensityModel = TWO_BUMP, n_list=(500, 2000, 8000, 32000),
                   replicates: int = 10, seed: int = 0, k0: float = 1.65, M: float | None = None,
                   scheme: str = "spiral", window: WindowFunction | None = None,
                   out_dir=None) -> RateResult:
    """Mean L^2 error per sample size and the least-squares log-log slope."""
    window = window or build_window()
    M = M if M is not None else model_sup(model)
    err_rule = product_rule(ERROR_RULE_DEGREE)
    truth = density_eval(model, err_rule.nodes)
    errors = {}
    rows = []
    for n in n_list:
        J = default_J(n, scheme)
        rules = default_rules(J, scheme)
        cfg = EstimatorConfig.for_sample_size(n, k0, M, J=J, scheme=scheme)
        errs = []
        for r in range(replicates):
            sample = sample_model(model, n, seed, replicate=r)
            est, _ = estimate_density(sample, cfg, window, rules)
            e = math.sqrt(integrate(err_rule, (est(err_rule.nodes) - truth) ** 2))
            errs.append(e)
            rows.append((n, r, J, e))
        errors[n] = errs
        log.info("n=%d J=%d mean L2 error %.4g", n, J, np.mean(errs))
    means = np.array([np.mean(errors[n]) for n in n_list])
    slope = float(np.polyfit(np.log(n_list), np.log(means), 1)[0])
    res = RateResult(tuple(n_list), errors, slope)
    if out_dir is not None:
        out_dir = Path(out_dir)
        _write_csv(out_dir / "rates.csv", ["n", "replicate", "J", "l2"], rows)
        _write_json(out_dir / "rates_summary.json",
                    {"n": list(n_list), "mean_l2": res.mean_errors(), "slope": slope,
                     "replicates": replicates, "seed": seed, "k0": k0, "M": M})
    return res
