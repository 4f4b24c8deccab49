"""Littlewood-Paley window pair (phi, b) for the needlet construction.

``phi`` equals 1 on [0, 1/2], 0 beyond 1, and descends on [1/2, 1] along the
normalized primitive of the bump ``u -> exp(-1/(1-u^2))`` (mapped affinely from
[-1, 1] onto [1/2, 1]).  ``b(xi) = sqrt(phi(xi/2) - phi(xi))`` then gives the
dyadic partition of unity ``sum_j b^2(xi / 2^j) = 1`` for ``|xi| >= 1``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import cumulative_simpson
from scipy.interpolate import PchipInterpolator


def _bump(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


@dataclass(frozen=True)
class WindowFunction:
    quadrature_resolution: int = 4096
    _primitive: PchipInterpolator = field(repr=False, default=None)

    def phi(self, xi):
        x = np.abs(np.asarray(xi, dtype=float))
        out = np.where(x <= 0.5, 1.0, 0.0)
        mid = (x > 0.5) & (x < 1.0)
        if np.any(mid):
            # primitive runs 0 -> 1 over u in [-1, 1]; u = 4 xi - 3
            out[mid] = 1.0 - np.clip(self._primitive(4.0 * x[mid] - 3.0), 0.0, 1.0)
        return out if out.ndim else float(out)

    def b2(self, xi):
        x = np.asarray(xi, dtype=float)
        out = np.maximum(self.phi(x / 2.0) - self.phi(x), 0.0)
        return out if np.ndim(out) else float(out)

    def b(self, xi):
        out = np.sqrt(self.b2(xi))
        return out if np.ndim(out) else float(out)

    def level_weights(self, j: int, squared: bool = False) -> np.ndarray:
        """``b(l / 2^j)`` (or its square) for ``l = 0 .. 2^(j+1)``."""
        l = np.arange(2 ** (j + 1) + 1) / 2.0**j
        return self.b2(l) if squared else self.b(l)

    def dump_csv(self, path, xi=None) -> None:
        """Write ``xi, phi, b`` rows for plotting."""
        if xi is None:
            xi = np.linspace(0.0, 2.5, 1001)
        xi = np.asarray(xi, dtype=float)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["xi", "phi", "b"])
            for x, p, bb in zip(xi, self.phi(xi), self.b(xi)):
                w.writerow([f"{x:.17g}", f"{p:.17g}", f"{bb:.17g}"])


def build_window(quadrature_resolution: int = 4096) -> WindowFunction:
    """Tabulate the bump primitive on ``quadrature_resolution + 1`` points and
    wrap it in a monotone cubic interpolant."""
    u = np.linspace(-1.0, 1.0, quadrature_resolution + 1)
    prim = cumulative_simpson(_bump(u), x=u, initial=0.0)
    prim /= prim[-1]
    prim = np.maximum.accumulate(prim)
    return WindowFunction(quadrature_resolution, PchipInterpolator(u, prim))


def partition_of_unity_defect(window: WindowFunction, xi: float, j_max: int) -> float:
    if xi < 1.0:
        raise ValueError("partition of unity only holds for xi >= 1")
    j = np.arange(j_max + 1)
    return float(abs(np.sum(window.b2(xi / 2.0**j)) - 1.0))


def localization_integral(window: WindowFunction, b2=None, resolution: int | None = None) -> float:
    """``(1/8) int_{1/2}^{2} t b^2(t) dt``.

    Composite Gauss-Legendre on the two smooth pieces [1/2, 1] and [1, 2]
    (``b^2`` has kinks in its derivatives only at 1).  ``b2`` overrides the
    window's own ``b^2`` (used to check the quadrature on known integrands).
    """
    f = window.b2 if b2 is None else b2
    n = resolution or window.quadrature_resolution
    total = 0.0
    for lo, hi in ((0.5, 1.0), (1.0, 2.0)):
        total += _composite_gauss(lambda t: t * f(t), lo, hi, n)
    return total / 8.0


def _composite_gauss(g, lo: float, hi: float, n: int, order: int = 8) -> float:
    x, w = leggauss(order)
    panels = max(n // order, 1)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    return float(np.sum((half[:, None] * w[None, :]).ravel() * g(pts)))
