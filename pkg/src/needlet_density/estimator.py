"""Hard-thresholding needlet density estimator.

    beta_hat_{j,eta} = (1/n) sum_i psi_{j,eta}(X_i)
    f_hat = 1/(4 pi) + sum_{j<=J} sum_eta beta_hat * 1{|beta_hat| >= kappa c_n} * psi_{j,eta}

with ``c_n = sqrt(log n / n)``, ``2^J ~ sqrt(n / log n)`` and the operational
threshold constant ``kappa = k0 * sqrt(0.107) * M`` where ``M`` bounds
``||f||_inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import _harmonics
from .cubature import CubatureRule, build_rule, integrate
from .frame import (CoefficientPyramid, default_rules, needlet_matrix, needlet_transform,
                    synthesize)
from .models import Sample
from .sphere import FOUR_PI
from .window import WindowFunction

# (1/8) int t b^2(t) dt for the bump window, the squared needlet norm scale
LOCALIZATION_I = 0.107


def default_cn(n: int) -> float:
    return math.sqrt(math.log(n) / n)


def default_J(n: int, scheme: str = "spiral") -> int:
    """``floor(log2(sqrt(n / log n)))``, lowered until there are no more
    coefficients than observations."""
    J = max(int(math.floor(0.5 * math.log2(n / math.log(n)))), 0) if n > 1 else 0
    while J > 0 and sum(len(build_rule(j, scheme)) for j in range(J + 1)) > n:
        J -= 1
    return J


@dataclass(frozen=True)
class EstimatorConfig:
    J: int
    kappa: float
    c_n: float
    M: float = 1.0 / FOUR_PI
    k0: float = 1.0
    scheme: str = "spiral"

    def __post_init__(self):
        if self.J < 0:
            raise ValueError("J must be >= 0")
        if self.kappa < 0 or self.M <= 0:
            raise ValueError("kappa must be >= 0 and M > 0")

    @classmethod
    def for_sample_size(cls, n: int, k0: float, M: float, J: int | None = None,
                        scheme: str = "spiral") -> "EstimatorConfig":
        if J is None:
            J = default_J(n, scheme)
        kappa = k0 * math.sqrt(LOCALIZATION_I) * M
        return cls(J=J, kappa=kappa, c_n=default_cn(n), M=M, k0=k0, scheme=scheme)

    @property
    def threshold(self) -> float:
        return self.kappa * self.c_n


def sample_moments(points: np.ndarray, lmax: int) -> np.ndarray:
    """Mean of the spherical harmonics up to ``lmax`` over the sample."""
    return _harmonics.moments(points, lmax) / len(points)


def empirical_coefficients(sample: Sample, J: int, window: WindowFunction,
                           rules: Sequence[CubatureRule] | None = None,
                           method: str = "harmonic") -> CoefficientPyramid:
    """``beta_hat_{j,eta} = mean_i psi_{j,eta}(X_i)`` for ``j <= J``.

    ``method="direct"`` sums needlet values point by point; ``"harmonic"``
    reduces the sample to harmonic moments first.  Both agree to rounding.
    """
    pts = sample.points if isinstance(sample, Sample) else np.atleast_2d(sample)
    if len(pts) == 0:
        raise ValueError("empty sample")
    rules = list(rules) if rules is not None else default_rules(J)
    if method == "harmonic":
        levels = needlet_transform(sample_moments(pts, 2 ** (J + 1) - 1), J, window, rules)
    elif method == "direct":
        levels = []
        for j in range(J + 1):
            acc = np.zeros(len(rules[j]))
            for s in range(0, len(pts), 1024):
                acc += needlet_matrix(rules[j], pts[s:s + 1024], window).sum(axis=0)
            levels.append(acc / len(pts))
    else:
        raise ValueError(f"unknown method {method!r}")
    return CoefficientPyramid(levels, "empirical", 1.0 / FOUR_PI, rules[0].scheme)


def hard_threshold(pyramid: CoefficientPyramid, config: EstimatorConfig | float
                   ) -> tuple[CoefficientPyramid, list[int]]:
    """Keep ``beta`` iff ``|beta| >= kappa c_n``; returns the new pyramid and
    the per-level survivor counts.  The constant term is left alone."""
    thr = config.threshold if isinstance(config, EstimatorConfig) else float(config)
    levels = [np.where(np.abs(b) >= thr, b, 0.0) for b in pyramid.levels]
    survivors = [int(np.count_nonzero(np.abs(b) >= thr)) for b in pyramid.levels]
    return replace(pyramid, levels=levels), survivors


@dataclass
class DensityEstimate:
    """Callable ``f_hat`` backed by a thresholded pyramid."""

    pyramid: CoefficientPyramid
    survivors: list[int]
    window: WindowFunction = field(repr=False)
    rules: list[CubatureRule] = field(repr=False)
    config: EstimatorConfig | None = None

    def __call__(self, x, method: str = "auto"):
        return synthesize(self.pyramid, x, self.window, self.rules, method=method)

    def l2_proxy(self) -> float:
        """``sqrt(sum of squared surviving coefficients)``."""
        return float(math.sqrt(sum(float(b @ b) for b in self.pyramid.levels)))


def estimate_density(sample: Sample, config: EstimatorConfig, window: WindowFunction,
                     rules: Sequence[CubatureRule] | None = None,
                     raw: CoefficientPyramid | None = None) -> tuple[DensityEstimate, CoefficientPyramid]:
    """Threshold the empirical pyramid of ``sample``.  ``raw`` reuses already
    computed empirical coefficients (they only depend on the sample and J)."""
    rules = list(rules) if rules is not None else default_rules(config.J, config.scheme)
    if raw is None:
        raw = empirical_coefficients(sample, config.J, window, rules)
    kept, survivors = hard_threshold(raw, config)
    return DensityEstimate(kept, survivors, window, rules, config), kept


def error_metrics(fhat: DensityEstimate | Callable, f_true: Callable, p_list=(2,),
                  eval_points: np.ndarray | None = None, rule: CubatureRule | None = None,
                  true_is_uniform: bool = False) -> dict:
    """Sup error over ``eval_points``; ``L^p`` errors by cubature over ``rule``;
    the coefficient-space L^2 proxy when the truth is uniform."""
    out = {}
    if eval_points is not None:
        diff = np.asarray(fhat(eval_points)) - np.asarray(f_true(eval_points))
        out["linf"] = float(np.max(np.abs(diff)))
    if rule is not None:
        diff = np.abs(np.asarray(fhat(rule.nodes)) - np.asarray(f_true(rule.nodes)))
        for p in p_list:
            if math.isinf(p):
                out["linf_rule"] = float(diff.max())
            else:
                out[f"l{p:g}"] = integrate(rule, diff**p) ** (1.0 / p)
    if true_is_uniform and isinstance(fhat, DensityEstimate):
        out["l2_proxy"] = fhat.l2_proxy()
    return out


def pilot_bound(sample: Sample, window: WindowFunction, J: int | None = None,
                scheme: str = "spiral", shape=(64, 128)) -> float:
    """Default ``M``: twice the sup of a pilot estimate with ``k0 = 1``.

    The pilot itself thresholds with the uniform level ``M = 1/(4 pi)``.
    """
    from .experiments import lattice

    n = sample.n
    cfg = EstimatorConfig.for_sample_size(n, 1.0, 1.0 / FOUR_PI, J=J, scheme=scheme)
    est, _ = estimate_density(sample, cfg, window)
    return 2.0 * float(np.max(est(lattice(shape)[2], method="harmonic")))
