"""Sphere difference decompositions and numerically dense generator sets.

This is the only float-valued geometry in the package.  Density is estimated,
never certified: rational points can only generate discrete groups.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

SPHERE_RTOL = 1e-12
_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)


@dataclass(frozen=True)
class SpherePoint:
    coords: np.ndarray
    radius: float

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        object.__setattr__(self, "coords", coords)
        if abs(np.linalg.norm(coords) - self.radius) > SPHERE_RTOL * max(self.radius, 1.0):
            raise ValueError("point is not on the sphere")


def _orthogonal_unit(x: np.ndarray) -> np.ndarray:
    """Unit vector orthogonal to ``x``; ``e_1`` when ``x = 0``."""
    d = x.shape[0]
    norm = np.linalg.norm(x)
    if norm == 0:
        v = np.zeros(d)
        v[0] = 1.0
        return v
    u = x / norm
    e = np.zeros(d)
    e[int(np.argmin(np.abs(u)))] = 1.0
    v = e - u * (u @ e)
    return v / np.linalg.norm(v)


def sphere_difference_decompose(x, delta: float) -> tuple[SpherePoint, SpherePoint]:
    """Points ``P, Q`` on the sphere of radius ``delta`` with ``Q - P = x``.

    ``P`` and ``Q`` are the base vertices of an isosceles triangle with apex at
    the origin, legs ``delta`` and base ``x``.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] < 2:
        raise ValueError("decomposition needs d > 1")
    if delta <= 0:
        raise ValueError("delta must be positive")
    norm = float(np.linalg.norm(x))
    if norm > 2 * delta * (1 + 1e-12):
        raise ValueError("x lies outside the ball of radius 2*delta")
    height = math.sqrt(max(delta * delta - norm * norm / 4, 0.0))
    v = _orthogonal_unit(x)
    p = -x / 2 + height * v
    q = x / 2 + height * v
    # renormalise against rounding when |x| is at the boundary
    p *= delta / np.linalg.norm(p)
    q = p + x
    return SpherePoint(p, delta), SpherePoint(q, delta)


def decompose_many(xs: np.ndarray, delta: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`sphere_difference_decompose` over the rows of ``xs``."""
    xs = np.asarray(xs, dtype=float)
    n, d = xs.shape
    if d < 2:
        raise ValueError("decomposition needs d > 1")
    norms = np.linalg.norm(xs, axis=1)
    if np.any(norms > 2 * delta * (1 + 1e-12)):
        raise ValueError("some x lies outside the ball of radius 2*delta")
    heights = np.sqrt(np.maximum(delta * delta - norms ** 2 / 4, 0.0))
    vs = np.empty_like(xs)
    for k in range(n):
        vs[k] = _orthogonal_unit(xs[k])
    ps = -xs / 2 + heights[:, None] * vs
    return ps, ps + xs


def kronecker_generators(d: int, delta: float, t: int) -> list[SpherePoint]:
    """``2t`` sphere points whose integer span is dense in ``R^d``.

    The differences ``y_j = h_{2j} - h_{2j-1}`` are ``delta * e_j`` for ``j <= d``
    followed by vectors with coordinates ``delta * sqrt(p) / 4`` for distinct
    primes ``p``, so the coordinates are independent over the rationals
    together with the lattice basis.
    """
    if d < 2:
        raise ValueError("dense generators on a sphere need d > 1")
    if t < d:
        raise ValueError("need t >= d generators to span R^d")
    extra = t - d
    if extra * d > len(_PRIMES):
        raise ValueError("not enough primes for the requested generators")
    ys = [delta * np.eye(d)[j] for j in range(d)]
    primes = iter(_PRIMES)
    for _ in range(extra):
        ys.append(delta * np.array([math.sqrt(next(primes)) for _ in range(d)]) / 4)
    out = []
    for y in ys:
        p, q = sphere_difference_decompose(y, delta)
        out.extend([p, q])
    return out


def _half_sums(points: np.ndarray, bound: int, cap: int) -> np.ndarray:
    sums = np.zeros((1, points.shape[1]))
    n = np.arange(-bound, bound + 1, dtype=float)
    for p in points:
        step = n[:, None] * p[None, :]
        size = sums.shape[0] * step.shape[0]
        if size > cap:
            raise ValueError(f"half sumset of {size} points exceeds the cap {cap}; lower coeff_bound")
        sums = (sums[:, None, :] + step[None, :, :]).reshape(-1, points.shape[1])
        sums = np.unique(np.round(sums, 9), axis=0)
    return sums


def density_diagnostic(points, box_half_width: float, eps: float, coeff_bound: int,
                       chunk: int = 4096, cap: int = 5_000_000) -> float:
    """Fraction of the ``eps``-grid on ``[-w, w]^d`` within ``eps`` of some
    ``sum n_i h_i`` with ``|n_i| <= coeff_bound``.

    The combination space is split into two halves; each half sumset is
    enumerated and pairs whose sum lands near the box are found with a k-d
    tree.  Halves are scanned by increasing norm and the scan stops once the
    whole grid is covered.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        raise ValueError("need at least one point")
    d = pts.shape[1]
    w = float(box_half_width)
    if w <= 0 or eps <= 0:
        raise ValueError("box_half_width and eps must be positive")
    axis = np.arange(-w, w + eps / 2, eps)
    g = axis.shape[0]
    covered = np.zeros((g,) * d, dtype=bool)
    split = (pts.shape[0] + 1) // 2
    half_a = _half_sums(pts[:split], coeff_bound, cap)
    half_b = _half_sums(pts[split:], coeff_bound, cap)
    half_a = half_a[np.argsort(np.linalg.norm(half_a, axis=1), kind="stable")]
    tree_b = cKDTree(half_b)
    offsets = np.array(np.meshgrid(*[[-1, 0, 1]] * d, indexing="ij")).reshape(d, -1).T
    reach = w + eps
    for start in range(0, half_a.shape[0], chunk):
        block = half_a[start:start + chunk]
        hits = tree_b.query_ball_point(-block, r=reach, p=np.inf)
        lengths = np.fromiter((len(h) for h in hits), dtype=np.int64, count=len(hits))
        if not lengths.sum():
            continue
        b_idx = np.concatenate([np.asarray(h, dtype=np.int64) for h in hits if h])
        a_idx = np.repeat(np.arange(block.shape[0]), lengths)
        sums = block[a_idx] + half_b[b_idx]
        base = np.rint((sums + w) / eps).astype(np.int64)
        for off in offsets:
            cand = base + off
            ok = np.all((cand >= 0) & (cand < g), axis=1)
            c = cand[ok]
            dist = np.linalg.norm(sums[ok] - (c * eps - w), axis=1)
            c = c[dist <= eps * (1 + 1e-12)]
            covered[tuple(c.T)] = True
        if covered.all():
            break
    return float(covered.mean())
