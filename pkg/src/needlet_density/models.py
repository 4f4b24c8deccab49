"""Densities on S^2 and samplers with reproducible random streams."""

from __future__ import annotations

import logging
import math
import zlib
from dataclasses import dataclass, field

import numpy as np

from .sphere import FOUR_PI, normalize, unit_vectors

log = logging.getLogger(__name__)


def rng_for(seed: int, replicate: int = 0, purpose: str = "sample") -> np.random.Generator:
    """Independent counter-based stream keyed by ``(seed, replicate, purpose)``."""
    key = (int(replicate), zlib.crc32(purpose.encode()))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=key)))


@dataclass(frozen=True)
class Sample:
    points: np.ndarray = field(repr=False)
    seed: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = unit_vectors(np.atleast_2d(self.points))
        if len(pts) == 0:
            raise ValueError("empty sample")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return len(self.points)


def bell_normalizer(k: float) -> float:
    """``c`` with ``int c exp(-k |x - x0|^2) dx = 1`` on S^2."""
    return k / (math.pi * -math.expm1(-4.0 * k))


@dataclass(frozen=True)
class DensityModel:
    kind: str = "uniform"
    centers: tuple = ()
    concentrations: tuple = ()
    weights: tuple = ()

    def __post_init__(self):
        if self.kind not in ("uniform", "bell_mixture"):
            raise ValueError("kind must be 'uniform' or 'bell_mixture'")
        if self.kind == "bell_mixture":
            if not (len(self.centers) == len(self.concentrations) == len(self.weights) > 0):
                raise ValueError("mixture needs matching centers, concentrations, weights")
            unit_vectors(np.asarray(self.centers, float))
            if min(self.concentrations) <= 0 or min(self.weights) < 0:
                raise ValueError("concentrations must be > 0 and weights >= 0")
            if abs(sum(self.weights) - 1.0) > 1e-12:
                raise ValueError("mixture weights must sum to 1")

    @property
    def normalizers(self) -> tuple:
        return tuple(bell_normalizer(k) for k in self.concentrations)


UNIFORM = DensityModel("uniform")

TWO_BUMP = DensityModel(
    "bell_mixture",
    centers=((0.0, 1.0, 0.0), (0.0, -0.8, 0.6)),
    concentrations=(0.7, 2.0),
    weights=(0.65, 0.35),
)


def density_eval(model: DensityModel, x) -> np.ndarray | float:
    pts = np.asarray(x, dtype=float)
    if model.kind == "uniform":
        out = np.full(pts.shape[:-1], 1.0 / FOUR_PI)
    else:
        out = np.zeros(pts.shape[:-1])
        for c0, k, w, c in zip(model.centers, model.concentrations, model.weights, model.normalizers):
            out = out + w * c * np.exp(-k * (2.0 - 2.0 * (pts @ np.asarray(c0, float))))
    return float(out) if out.ndim == 0 else out


def uniform_points(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.uniform(-1.0, 1.0, n)
    phi = rng.uniform(0.0, 2 * np.pi, n)
    r = np.sqrt(1.0 - z * z)
    return normalize(np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1))


def sample_uniform(n: int, seed: int, replicate: int = 0) -> Sample:
    if n < 1:
        raise ValueError("n must be >= 1")
    pts = uniform_points(n, rng_for(seed, replicate, "uniform"))
    return Sample(pts, {"seed": seed, "replicate": replicate, "model": "uniform"})


def _bell_points(center, k: float, n: int, rng: np.random.Generator) -> tuple[np.ndarray, float]:
    center = np.asarray(center, float)
    out, tried, accepted = [], 0, 0
    need = n
    while need > 0:
        batch = max(64, int(need * 4 * math.pi * bell_normalizer(k) * 1.2))
        prop = uniform_points(batch, rng)
        accept = rng.uniform(size=batch) < np.exp(-k * (2.0 - 2.0 * (prop @ center)))
        tried += batch
        accepted += int(accept.sum())
        out.append(prop[accept][:need])
        need -= len(out[-1])
    return np.concatenate(out), accepted / tried


def sample_mixture(model: DensityModel, n: int, seed: int, replicate: int = 0) -> Sample:
    """Component by weight, then rejection against the uniform envelope."""
    if model.kind == "uniform":
        return sample_uniform(n, seed, replicate)
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = rng_for(seed, replicate, "mixture")
    labels = rng.choice(len(model.weights), size=n, p=np.asarray(model.weights))
    pts = np.empty((n, 3))
    rates = []
    for i, (c0, k) in enumerate(zip(model.centers, model.concentrations)):
        sel = np.flatnonzero(labels == i)
        if sel.size:
            pts[sel], rate = _bell_points(c0, k, sel.size, rng)
            rates.append(rate)
            log.debug("component %d: acceptance rate %.3f", i, rate)
    return Sample(pts, {"seed": seed, "replicate": replicate, "model": "bell_mixture",
                        "acceptance": rates})


def sample_model(model: DensityModel, n: int, seed: int, replicate: int = 0) -> Sample:
    if model.kind == "uniform":
        return sample_uniform(n, seed, replicate)
    return sample_mixture(model, n, seed, replicate)


MODELS_BY_NAME = {"uniform": UNIFORM, "twobump": TWO_BUMP}
