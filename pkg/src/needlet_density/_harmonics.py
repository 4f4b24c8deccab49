"""Real orthonormal spherical harmonics, used internally.

Only two reductions are exposed: weighted moments ``sum_i w_i Y_k(x_i)`` and
synthesis ``sum_k c_k Y_k(x)``.  Via the addition theorem
``L_l(<x, y>) = sum_{|m|<=l} Y_lm(x) Y_lm(y)`` these turn needlet sums over a
sample or a grid into cheap matrix products; they also drive the solve for
cubature weights.  Index order is degree-major, ``k = l^2 + l + m``, so the
harmonics of degree <= L are the prefix of length ``(L+1)^2``.
"""

from __future__ import annotations

import numpy as np

CHUNK = 2048


def n_harmonics(lmax: int) -> int:
    return (lmax + 1) ** 2


def degree_of_index(lmax: int) -> np.ndarray:
    """Degree ``l`` for each harmonic index up to ``lmax``."""
    return np.repeat(np.arange(lmax + 1), 2 * np.arange(lmax + 1) + 1)


def real_harmonics(points, lmax: int) -> np.ndarray:
    """``Y[k, i]`` for all ``(l+1)^2`` harmonics at ``points`` (n, 3)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    z = np.clip(pts[:, 2], -1.0, 1.0)
    s = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    out = np.empty((n_harmonics(lmax), len(z)))
    pmm = np.full_like(z, 1.0 / np.sqrt(4.0 * np.pi))
    root2 = np.sqrt(2.0)
    for m in range(lmax + 1):
        if m > 0:
            pmm = pmm * s * np.sqrt((2 * m + 1) / (2 * m))
            cos_m = root2 * np.cos(m * phi)
            sin_m = root2 * np.sin(m * phi)
        p2, p1 = None, pmm
        for l in range(m, lmax + 1):
            if l == m:
                p = pmm
            elif l == m + 1:
                p = np.sqrt(2 * m + 3) * z * pmm
            else:
                a = np.sqrt((4 * l * l - 1) / (l * l - m * m))
                bb = np.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
                p = a * (z * p1 - bb * p2)
            if l > m:
                p2, p1 = p1, p
            base = l * l + l
            if m == 0:
                out[base] = p
            else:
                out[base + m] = p * cos_m
                out[base - m] = p * sin_m
    return out


def moments(points, lmax: int, weights=None, chunk: int = CHUNK) -> np.ndarray:
    """``sum_i weights[i] Y_k(points[i])``; ``weights`` may be (n,) or (n, r)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = len(pts)
    if weights is None:
        weights = np.ones(n)
    weights = np.asarray(weights, dtype=float)
    out = np.zeros((n_harmonics(lmax),) + weights.shape[1:])
    for s in range(0, n, chunk):
        out += real_harmonics(pts[s:s + chunk], lmax) @ weights[s:s + chunk]
    return out


def synthesis(coeffs, points, chunk: int = CHUNK) -> np.ndarray:
    """``sum_k coeffs[k] Y_k(points)``; ``coeffs`` may be (K,) or (K, r)."""
    c = np.asarray(coeffs, dtype=float)
    lmax = int(round(np.sqrt(c.shape[0]))) - 1
    if n_harmonics(lmax) != c.shape[0]:
        raise ValueError("coefficient length is not a square")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.empty((len(pts),) + c.shape[1:])
    for s in range(0, len(pts), chunk):
        out[s:s + chunk] = real_harmonics(pts[s:s + chunk], lmax).T @ c
    return out
