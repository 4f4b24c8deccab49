"""Geometry of the 2-sphere and the normalized Legendre projector kernels.

Points are plain ``numpy`` arrays of shape ``(3,)`` or ``(n, 3)``.  The
projector kernel of degree ``l`` is

    L_l(t) = (2l + 1) / (4 pi) * P_l(t),

the reproducing kernel of the degree-``l`` spherical harmonics on S^2, so that
``int L_l(<x,y>) L_k(<y,z>) dy = delta_lk L_l(<x,z>)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FOUR_PI = 4.0 * np.pi
UNIT_TOL = 1e-12
T_GUARD = 1e-9


def unit_vectors(points, tol: float = UNIT_TOL) -> np.ndarray:
    """Validate ``points`` as unit vectors and return them as a float array.

    Accepts a single point ``(3,)`` or a stack ``(n, 3)``.  Raises
    ``ValueError`` if any point is off the sphere by more than ``tol``.
    """
    arr = np.asarray(points, dtype=float)
    if arr.shape[-1] != 3 or arr.ndim not in (1, 2):
        raise ValueError(f"expected shape (3,) or (n, 3), got {arr.shape}")
    norms = np.einsum("...i,...i->...", arr, arr)
    if not np.all(np.abs(norms - 1.0) <= tol):
        worst = float(np.max(np.abs(norms - 1.0)))
        raise ValueError(f"points are not unit vectors (max |x|^2-1 = {worst:.3g})")
    return arr


def normalize(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    return arr / np.linalg.norm(arr, axis=-1, keepdims=True)


def from_angles(theta, phi) -> np.ndarray:
    """Unit vectors from colatitude ``theta`` and longitude ``phi``."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def to_angles(points) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(points, dtype=float)
    # arctan2 keeps full precision near the poles, unlike arccos(z)
    theta = np.arctan2(np.hypot(arr[..., 0], arr[..., 1]), arr[..., 2])
    phi = np.mod(np.arctan2(arr[..., 1], arr[..., 0]), 2 * np.pi)
    return theta, phi


def geodesic_distance(a, b) -> np.ndarray | float:
    """Great-circle distance ``arccos <a, b>`` in [0, pi], broadcasting over leading axes."""
    dot = np.einsum("...i,...i->...", np.asarray(a, float), np.asarray(b, float))
    out = np.arccos(np.clip(dot, -1.0, 1.0))
    return float(out) if np.ndim(out) == 0 else out


def _check_t(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0 + T_GUARD) or not np.all(np.isfinite(t)):
        raise ValueError("kernel argument outside [-1, 1]")
    return np.clip(t, -1.0, 1.0)


def legendre_table(lmax: int, t) -> np.ndarray:
    """Classical Legendre values ``P_0..P_lmax`` at ``t``, shape ``(lmax+1, *t.shape)``.

    Upward three-term recurrence; stable on [-1, 1].
    """
    if lmax < 0:
        raise ValueError("lmax must be >= 0")
    t = _check_t(t)
    out = np.empty((lmax + 1,) + t.shape)
    out[0] = 1.0
    if lmax >= 1:
        out[1] = t
    for l in range(2, lmax + 1):
        out[l] = ((2 * l - 1) * t * out[l - 1] - (l - 1) * out[l - 2]) / l
    return out


def legendre_kernel(l: int, t):
    """Projector kernel ``L_l(t) = (2l+1)/(4 pi) P_l(t)``."""
    if l < 0:
        raise ValueError("degree must be >= 0")
    t = _check_t(t)
    if l == 0:
        val = np.full(t.shape, 1.0 / FOUR_PI)
    else:
        p_prev, p = np.ones_like(t), t.copy()
        for k in range(2, l + 1):
            p_prev, p = p, ((2 * k - 1) * t * p - (k - 1) * p_prev) / k
        val = (2 * l + 1) / FOUR_PI * p
    return float(val) if val.ndim == 0 else val


def projector_kernel_sum(weights, t):
    """Evaluate ``sum_l weights[l] * L_l(t)``.

    Uses Clenshaw's recurrence on the Legendre series with coefficients
    ``weights[l] (2l+1)/(4 pi)``, which is the same ascending recurrence run
    backwards; terms are combined in a fixed order so results are reproducible.
    """
    w = np.asarray(weights, dtype=float)
    t = _check_t(t)
    if w.size == 0:
        out = np.zeros(t.shape)
        return float(out) if out.ndim == 0 else out
    c = w * (2 * np.arange(w.size) + 1) / FOUR_PI
    out = clenshaw_legendre(c, t)
    return float(out) if np.ndim(out) == 0 else out


def clenshaw_legendre(coeffs: np.ndarray, t: np.ndarray) -> np.ndarray:
    """``sum_l coeffs[l] P_l(t)`` by Clenshaw's algorithm (no range check)."""
    n = len(coeffs) - 1
    b1 = np.zeros(np.shape(t))
    b2 = np.zeros(np.shape(t))
    for k in range(n, 0, -1):
        # P_{k+1} = alpha_k P_k + beta_{k+1} P_{k-1}
        alpha = (2 * k + 1) / (k + 1) * t
        beta = -(k + 1) / (k + 2)
        b1, b2 = coeffs[k] + alpha * b1 + beta * b2, b1
    return coeffs[0] + t * b1 - 0.5 * b2


@dataclass(frozen=True)
class KernelTable:
    """Projector kernels ``L_0..L_max_degree`` tabulated on a fixed grid of ``t``.

    Built once, then read-only.  ``values[l, i] = L_l(t[i])``.
    """

    max_degree: int
    t: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, max_degree: int, t) -> "KernelTable":
        t = _check_t(t)
        scale = (2 * np.arange(max_degree + 1) + 1) / FOUR_PI
        vals = legendre_table(max_degree, t) * scale.reshape((-1,) + (1,) * t.ndim)
        vals.setflags(write=False)
        t.setflags(write=False)
        return cls(max_degree, t, vals)

    def __call__(self, l: int) -> np.ndarray:
        return self.values[l]
