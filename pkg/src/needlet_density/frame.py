"""Needlet frame on S^2: atoms, analysis, synthesis, Besov norms, diagnostics.

A needlet of level ``j`` centred at the cubature node ``eta`` is

    psi_{j,eta}(x) = sqrt(lambda_eta) * sum_l b(l / 2^j) L_l(<x, eta>),

with ``b`` from the window and the sum running over ``2^(j-1) < l < 2^(j+1)``.
Any ``f`` in L^2 expands as ``1/(4 pi) * int f + sum_j sum_eta beta_{j,eta} psi_{j,eta}``
with ``beta_{j,eta} = <f, psi_{j,eta}>``.

Two evaluation routes are kept side by side.  The *direct* route sums the
Legendre series at every ``<x, eta>``.  The *harmonic* route first reduces the
data to spherical-harmonic moments and then applies the addition theorem,
which is much cheaper for large samples and grids.  Tests check one against
the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import _harmonics
from .cubature import CubatureRule, build_rule, product_rule
from .sphere import FOUR_PI, clenshaw_legendre, projector_kernel_sum
from .window import WindowFunction

# degree used when the integrand is not known to be band-limited
HIGH_RES_DEGREE = 2 ** 10 - 2


@dataclass(frozen=True)
class NeedletAtom:
    j: int
    index: int
    center: np.ndarray
    weight: float

    @classmethod
    def from_rule(cls, rule: CubatureRule, index: int) -> "NeedletAtom":
        return cls(rule.j, index, rule.nodes[index], float(rule.weights[index]))


@dataclass(frozen=True)
class BesovParams:
    s: float
    r: float = 2.0
    q: float = 2.0

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError("Besov smoothness s must be > 0")
        if self.r < 1 or self.q < 1:
            raise ValueError("Besov indices r, q must be >= 1 (math.inf allowed)")


@dataclass
class CoefficientPyramid:
    """Needlet coefficients for levels ``0..J``, aligned with the rules' node order.

    ``constant`` is the coefficient of the constant function (``1/(4 pi)`` for
    a density) and is kept apart from the levels; thresholding never touches it.
    """

    levels: list[np.ndarray]
    kind: str = "exact"
    constant: float = 1.0 / FOUR_PI
    scheme: str = "spiral"

    def __post_init__(self):
        if self.kind not in ("exact", "empirical"):
            raise ValueError("kind must be 'exact' or 'empirical'")
        self.levels = [np.asarray(b, dtype=float) for b in self.levels]

    @property
    def J(self) -> int:
        return len(self.levels) - 1

    def counts(self) -> list[int]:
        return [len(b) for b in self.levels]

    def nonzero(self) -> list[int]:
        return [int(np.count_nonzero(b)) for b in self.levels]

    def scaled(self, a: float) -> "CoefficientPyramid":
        return replace(self, levels=[a * b for b in self.levels])

    def check_rules(self, rules: Sequence[CubatureRule]) -> None:
        if len(rules) < len(self.levels):
            raise ValueError(f"need rules for levels 0..{self.J}")
        for j, b in enumerate(self.levels):
            if len(b) != len(rules[j]):
                raise ValueError(f"level {j}: {len(b)} coefficients vs {len(rules[j])} nodes")


def default_rules(J: int, scheme: str = "spiral") -> list[CubatureRule]:
    return [build_rule(j, scheme) for j in range(J + 1)]


def level_band(window: WindowFunction, j: int, squared: bool = False) -> np.ndarray:
    """``b(l/2^j)`` for ``l = 0 .. 2^(j+1)`` (zero outside the open band)."""
    return window.level_weights(j, squared=squared)


def _series_coeffs(window: WindowFunction, j: int, squared: bool = False) -> np.ndarray:
    band = level_band(window, j, squared)
    return band * (2 * np.arange(len(band)) + 1) / FOUR_PI


def needlet_eval(atom: NeedletAtom, x, window: WindowFunction):
    """``psi_{j,eta}(x)`` by direct Legendre summation."""
    t = np.clip(np.asarray(x, float) @ atom.center, -1.0, 1.0)
    return math.sqrt(atom.weight) * projector_kernel_sum(level_band(window, atom.j), t)


def needlet_matrix(rule: CubatureRule, points, window: WindowFunction,
                   nodes: np.ndarray | None = None) -> np.ndarray:
    """``M[i, k] = psi_{j, eta_k}(points[i])`` for the nodes of ``rule`` (direct route).

    ``nodes`` restricts the columns to a subset of node indices.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    idx = np.arange(len(rule)) if nodes is None else np.asarray(nodes)
    t = np.clip(pts @ rule.nodes[idx].T, -1.0, 1.0)
    vals = clenshaw_legendre(_series_coeffs(window, rule.j), t)
    return vals * np.sqrt(rule.weights[idx])


def l2_norm_squared(atom: NeedletAtom, window: WindowFunction) -> float:
    """``||psi||_2^2 = lambda * sum_l b^2(l/2^j) (2l+1)/(4 pi)``."""
    return atom.weight * float(np.sum(_series_coeffs(window, atom.j, squared=True)))


def covariance_profile(j: int, theta, window: WindowFunction, weight: float):
    """``lambda * sum_l b^2(l/2^j) L_l(cos theta)`` as a function of node separation."""
    t = np.cos(np.asarray(theta, dtype=float))
    return weight * projector_kernel_sum(level_band(window, j, squared=True), t)


def coefficient_covariance(j: int, xi: int, eta: int, window: WindowFunction,
                           rule: CubatureRule) -> float:
    """``sqrt(lambda_xi lambda_eta) sum_l b^2(l/2^j) L_l(<xi, eta>)`` for node indices.

    This is ``int psi_{j,xi} psi_{j,eta} dx``.  For an i.i.d. sample of size
    ``n`` from the uniform density ``1/(4 pi)`` the covariance of the empirical
    coefficients is this value divided by ``4 pi n``.
    """
    t = float(np.clip(rule.nodes[xi] @ rule.nodes[eta], -1.0, 1.0))
    lam = math.sqrt(rule.weights[xi] * rule.weights[eta])
    return lam * projector_kernel_sum(level_band(window, j, squared=True), t)


def needlet_transform(moments: np.ndarray, J: int, window: WindowFunction,
                      rules: Sequence[CubatureRule]) -> list[np.ndarray]:
    """Needlet coefficients from harmonic moments ``a_k = <g, Y_k>``.

    ``beta_{j,eta} = sqrt(lambda_eta) sum_k b(l_k/2^j) a_k Y_k(eta)``.  The
    moments must cover degrees up to ``2^(J+1) - 1``; extra columns of
    ``moments`` are carried through (one pyramid per column).
    """
    moments = np.asarray(moments, dtype=float)
    out = []
    for j in range(J + 1):
        lmax = 2 ** (j + 1) - 1
        k = _harmonics.n_harmonics(lmax)
        if moments.shape[0] < k:
            raise ValueError(f"moments stop below degree {lmax}")
        band = level_band(window, j)[_harmonics.degree_of_index(lmax)]
        g = moments[:k] * (band if moments.ndim == 1 else band[:, None])
        vals = _harmonics.synthesis(g, rules[j].nodes)
        sq = np.sqrt(rules[j].weights)
        out.append(vals * (sq if vals.ndim == 1 else sq[:, None]))
    return out


def analysis_rule(J: int, band_limit: int | None) -> CubatureRule:
    """Rule used for ``<f, psi>``: exact when ``f`` has degree <= ``band_limit``."""
    top = 2 ** (J + 1) - 1
    degree = HIGH_RES_DEGREE if band_limit is None else band_limit + top
    return product_rule(degree)


def analyze(f: Callable[[np.ndarray], np.ndarray], J: int, window: WindowFunction,
            rules: Sequence[CubatureRule] | None = None, band_limit: int | None = None,
            scheme: str = "spiral") -> CoefficientPyramid:
    """Exact needlet coefficients ``<f, psi_{j,eta}>`` for ``j <= J``.

    Inner products are computed by cubature.  With ``band_limit`` given they are
    exact; otherwise a degree-1022 product rule is used and the error is that
    of truncating ``f`` at that degree.
    """
    rules = list(rules) if rules is not None else default_rules(J, scheme)
    quad = analysis_rule(J, band_limit)
    vals = np.asarray(f(quad.nodes), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("f is not finite on the analysis nodes")
    moments = _harmonics.moments(quad.nodes, 2 ** (J + 1) - 1, quad.weights * vals)
    levels = needlet_transform(moments, J, window, rules)
    const = float(np.sum(quad.weights * vals)) / FOUR_PI
    return CoefficientPyramid(levels, "exact", const, rules[0].scheme)


def synthesis_moments(pyramid: CoefficientPyramid, window: WindowFunction,
                      rules: Sequence[CubatureRule]) -> np.ndarray:
    """Harmonic coefficients of ``sum_j sum_eta beta psi`` (constant term excluded)."""
    top = 2 ** (pyramid.J + 1) - 1
    c = np.zeros(_harmonics.n_harmonics(top))
    for j, beta in enumerate(pyramid.levels):
        keep = np.flatnonzero(beta)
        if keep.size == 0:
            continue
        lmax = 2 ** (j + 1) - 1
        band = level_band(window, j)[_harmonics.degree_of_index(lmax)]
        w = beta[keep] * np.sqrt(rules[j].weights[keep])
        c[:band.size] += band * _harmonics.moments(rules[j].nodes[keep], lmax, w)
    return c


def synthesize(pyramid: CoefficientPyramid, x, window: WindowFunction,
               rules: Sequence[CubatureRule] | None = None, method: str = "auto"):
    """``constant + sum_j sum_eta beta_{j,eta} psi_{j,eta}(x)``.

    ``method`` is ``"direct"`` (Legendre sums over nonzero coefficients),
    ``"harmonic"`` or ``"auto"`` (harmonic for more than a few hundred points).
    """
    rules = list(rules) if rules is not None else default_rules(pyramid.J, pyramid.scheme)
    pyramid.check_rules(rules)
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    if method == "auto":
        method = "harmonic" if len(pts) > 256 else "direct"
    if method == "harmonic":
        out = pyramid.constant + _harmonics.synthesis(synthesis_moments(pyramid, window, rules), pts)
    elif method == "direct":
        out = np.full(len(pts), pyramid.constant)
        for j, beta in enumerate(pyramid.levels):
            keep = np.flatnonzero(beta)
            if keep.size:
                out += needlet_matrix(rules[j], pts, window, keep) @ beta[keep]
    else:
        raise ValueError(f"unknown method {method!r}")
    return out if np.ndim(x) > 1 else float(out[0])


def _lp(v: np.ndarray, p: float) -> float:
    v = np.abs(v)
    if math.isinf(p):
        return float(v.max()) if v.size else 0.0
    return float(np.sum(v**p) ** (1.0 / p))


def besov_norm(pyramid: CoefficientPyramid, params: BesovParams, d: int = 2) -> float:
    """``|| (2^{j[s + d(1/2 - 1/r)]} ||beta_j||_{l_r})_j ||_{l_q}``."""
    inv_r = 0.0 if math.isinf(params.r) else 1.0 / params.r
    expo = params.s + d * (0.5 - inv_r)
    seq = np.array([2.0 ** (j * expo) * _lp(b, params.r) for j, b in enumerate(pyramid.levels)])
    return _lp(seq, params.q)


def zero_sums(pyramid: CoefficientPyramid, rules: Sequence[CubatureRule]) -> np.ndarray:
    """``sum_eta sqrt(lambda_eta) beta_{j,eta}`` per level (identically zero in theory)."""
    return np.array([np.sqrt(rules[j].weights) @ b for j, b in enumerate(pyramid.levels)])


def save_pyramid(pyramid: CoefficientPyramid, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"needlet-coeffs v1 J={pyramid.J} kind={pyramid.kind} scheme={pyramid.scheme}\n")
        fh.write(f"const {pyramid.constant:.17g}\n")
        for j, b in enumerate(pyramid.levels):
            for k, v in enumerate(b):
                fh.write(f"{j} {k} {v:.17g}\n")


class PyramidParseError(ValueError):
    pass


def load_pyramid(path, rules: Sequence[CubatureRule] | None = None) -> CoefficientPyramid:
    """Read a pyramid file.  Level lengths come from ``rules`` (or the default
    rules of the file's scheme); absent entries are zero."""
    with open(path) as fh:
        lines = [(i, ln.strip()) for i, ln in enumerate(fh, start=1)]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise PyramidParseError("empty coefficient file")
    lineno, head = lines[0]
    parts = head.split()
    if parts[:2] != ["needlet-coeffs", "v1"]:
        raise PyramidParseError(f"line {lineno}: expected 'needlet-coeffs v1' header")
    meta = dict(tok.partition("=")[::2] for tok in parts[2:])
    try:
        J = int(meta["J"])
        kind = meta["kind"]
    except (KeyError, ValueError):
        raise PyramidParseError(f"line {lineno}: header needs J=<int> and kind=<...>") from None
    scheme = meta.get("scheme", "spiral")
    rules = list(rules) if rules is not None else default_rules(J, scheme)
    levels = [np.zeros(len(rules[j])) for j in range(J + 1)]
    const = None
    for lineno, ln in lines[1:]:
        parts = ln.split()
        try:
            if parts[0] == "const" and len(parts) == 2:
                const = float(parts[1])
                continue
            if len(parts) != 3:
                raise ValueError
            j, k, v = int(parts[0]), int(parts[1]), float(parts[2])
            levels[j][k] = v
        except (ValueError, IndexError):
            raise PyramidParseError(f"line {lineno}: expected 'j node_index beta'") from None
    if const is None:
        raise PyramidParseError("missing 'const' line")
    return CoefficientPyramid(levels, kind, const, scheme)
