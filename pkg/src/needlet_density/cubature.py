"""Positive-weight cubature rules on S^2, one per needlet level.

Level ``j`` needs exactness up to degree ``L = 2^(j+2) - 2`` so that products
of two level-``j`` needlets integrate exactly.  Two constructions:

``"spiral"`` (default)
    ``ceil(1.2 * 2^(2j+4))`` Fibonacci-spiral nodes.  Weights are the
    minimum-norm correction of the equal weights ``4 pi / N`` that makes the
    rule exact on all harmonics of degree <= L.  Weights stay within about 10%
    of equal, so every needlet of a level has nearly the same norm.  Rules for
    ``j <= 5`` ship precomputed in ``data/``; ``scripts/build_grids.py``
    regenerates them.

``"product"``
    Gauss-Legendre in ``cos(theta)`` times ``L + 1`` equispaced longitudes.
    Exact by construction and cheap to any level, but weights shrink like
    ``sin(theta)`` towards the poles.
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import scipy.linalg as sla
from numpy.polynomial.legendre import leggauss

from . import _harmonics
from .sphere import FOUR_PI, UNIT_TOL

MAX_LEVEL = {"product": 12, "spiral": 5}
SPIRAL_OVERSAMPLE = 1.2
SCHEMES = tuple(MAX_LEVEL)


class GridParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class GridValidationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CubatureRule:
    j: int
    exact_degree: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    scheme: str = "spiral"

    def __post_init__(self):
        nodes = np.ascontiguousarray(self.nodes, dtype=float)
        weights = np.ascontiguousarray(self.weights, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != 3 or len(nodes) != len(weights):
            raise GridValidationError("nodes must be (N, 3) with N weights")
        if not np.all(weights > 0):
            raise GridValidationError("cubature weights must be positive")
        if not np.all(np.abs(np.einsum("ij,ij->i", nodes, nodes) - 1.0) <= UNIT_TOL):
            raise GridValidationError("cubature nodes must be unit vectors")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return len(self.weights)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CubatureRule):
            return NotImplemented
        return (
            self.j == other.j
            and self.exact_degree == other.exact_degree
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = object.__hash__


def level_degree(j: int) -> int:
    return 2 ** (j + 2) - 2


def fibonacci_nodes(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    phi = np.pi * (1.0 + math.sqrt(5.0)) * i
    r = np.sqrt(1.0 - z * z)
    pts = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def product_rule(degree: int, j: int = -1) -> CubatureRule:
    """Gauss-Legendre x equiangular rule exact to ``degree``."""
    n_lat = (degree + 2) // 2
    n_lon = degree + 1
    z, wz = leggauss(n_lat)
    phi = 2 * np.pi * np.arange(n_lon) / n_lon
    zz, pp = np.meshgrid(z, phi, indexing="ij")
    r = np.sqrt(1.0 - zz**2)
    nodes = np.stack([r * np.cos(pp), r * np.sin(pp), zz], axis=-1).reshape(-1, 3)
    nodes /= np.linalg.norm(nodes, axis=1, keepdims=True)
    weights = np.repeat(wz * (2 * np.pi / n_lon), n_lon)
    return CubatureRule(j, degree, nodes, weights, "product")


def solve_spiral_rule(j: int, oversample: float = SPIRAL_OVERSAMPLE) -> CubatureRule:
    """Compute the spiral rule from scratch (minutes and ~2.5 GB at j=5)."""
    degree = level_degree(j)
    n = int(math.ceil(oversample * 2 ** (2 * j + 4)))
    nodes = fibonacci_nodes(n)
    k = _harmonics.n_harmonics(degree)
    w0 = FOUR_PI / n
    gram = np.zeros((k, k), order="F")
    rhs = np.zeros(k)
    rhs[0] = math.sqrt(FOUR_PI)
    for s in range(0, n, _harmonics.CHUNK):
        y = _harmonics.real_harmonics(nodes[s:s + _harmonics.CHUNK], degree)
        gram += y @ y.T
        rhs -= w0 * y.sum(axis=1)
        del y
    factor = sla.cho_factor(gram, overwrite_a=True, check_finite=False)
    coef = sla.cho_solve(factor, rhs)
    del gram, factor
    weights = w0 + _harmonics.synthesis(coef, nodes)
    return CubatureRule(j, degree, nodes, weights, "spiral")


def _packaged_grid(j: int) -> Path | None:
    path = resources.files("needlet_density") / "data" / f"spiral_j{j}.grid"
    return Path(str(path)) if path.is_file() else None


@functools.lru_cache(maxsize=None)
def build_rule(j: int, scheme: str = "spiral") -> CubatureRule:
    """Cubature rule ``Z_j`` exact to degree ``2^(j+2) - 2``."""
    if scheme not in MAX_LEVEL:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
    if not 0 <= j <= MAX_LEVEL[scheme]:
        raise ValueError(f"level j={j} outside 0..{MAX_LEVEL[scheme]} for {scheme} rules")
    if scheme == "product":
        return product_rule(level_degree(j), j)
    cached = _packaged_grid(j)
    if cached is not None:
        return load_rule(cached)
    return solve_spiral_rule(j)


def integrate(rule: CubatureRule, f, workers: int = 1) -> float:
    """``sum_eta lambda_eta f(eta)``.

    ``f`` is a callable on an ``(N, 3)`` array or an array of node values.
    With ``workers > 1`` the nodes are split into contiguous blocks whose
    partial sums are combined in block order.
    """
    values = f(rule.nodes) if callable(f) else f
    values = np.asarray(values, dtype=float)
    if values.shape != rule.weights.shape:
        raise ValueError("integrand must give one value per node")
    if not np.all(np.isfinite(values)):
        raise ValueError("integrand is not finite on the cubature nodes")
    terms = rule.weights * values
    if workers <= 1:
        return float(np.sum(terms))
    blocks = np.array_split(terms, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        partial = list(pool.map(np.sum, blocks))
    return float(math.fsum(partial))


def save_rule(rule: CubatureRule, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"needlet-grid v1 j={rule.j} degree={rule.exact_degree} count={len(rule)}\n")
        fh.write(f"# scheme={rule.scheme}\n")
        for (x, y, z), w in zip(rule.nodes, rule.weights):
            fh.write(f"{x:.17g} {y:.17g} {z:.17g} {w:.17g}\n")


def _parse_header(line: str, lineno: int) -> dict[str, int]:
    parts = line.split()
    if parts[:2] != ["needlet-grid", "v1"]:
        raise GridParseError("expected 'needlet-grid v1' header", lineno)
    fields = {}
    for tok in parts[2:]:
        key, sep, val = tok.partition("=")
        if not sep:
            raise GridParseError(f"bad header token {tok!r}", lineno)
        try:
            fields[key] = int(val)
        except ValueError:
            raise GridParseError(f"non-integer header value {tok!r}", lineno) from None
    missing = {"j", "degree", "count"} - fields.keys()
    if missing:
        raise GridParseError(f"header missing {sorted(missing)}", lineno)
    return fields


def load_rule(path) -> CubatureRule:
    header = None
    scheme = "spiral"
    rows = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                if key.strip() == "scheme":
                    scheme = val.strip()
                continue
            if header is None:
                header = _parse_header(line, lineno)
                continue
            parts = line.split()
            if len(parts) != 4:
                raise GridParseError(f"expected 'x y z weight', got {len(parts)} fields", lineno)
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise GridParseError("non-numeric field", lineno) from None
    if header is None:
        raise GridParseError("empty grid file")
    if len(rows) != header["count"]:
        raise GridParseError(f"expected {header['count']} nodes, found {len(rows)} (truncated?)")
    data = np.array(rows).reshape(-1, 4)
    return CubatureRule(header["j"], header["degree"], data[:, :3], data[:, 3], scheme)
