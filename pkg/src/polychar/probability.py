"""Monte Carlo harness: linear forms of independent vectors, empirical
characteristic functions, product-equation residuals, distance-correlation
independence tests and quadratic fits of the log characteristic function.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numba import njit

CHUNK = 65536
MAGNITUDE_FLOOR = 0.1
PERMUTATIONS = 199
MIN_TEST_SIZE = 20
EXACT_DCOV_LIMIT = 4000

FAMILIES = ("gaussian", "uniform_box", "laplace", "degenerate", "custom")
SAMPLERS: dict[str, Callable[[np.random.Generator, int, int], np.ndarray]] = {}


class MagnitudeFloorError(ValueError):
    """A characteristic function estimate fell below the trusted magnitude."""


def register_sampler(name: str, fn: Callable[[np.random.Generator, int, int], np.ndarray]) -> None:
    """Register ``fn(rng, n, d) -> (n, d) array`` for the ``custom`` family."""
    SAMPLERS[name] = fn


@dataclass(frozen=True)
class RandomVectorSpec:
    d: int
    family: str
    seed: int = 0
    mean: tuple | None = None
    cov: tuple | None = None
    low: float = -1.0
    high: float = 1.0
    scale: float = 1.0
    sampler: str | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.d < 1:
            raise ValueError("d must be positive")
        if self.cov is not None:
            cov = np.asarray(self.cov, dtype=float)
            if cov.shape != (self.d, self.d) or not np.allclose(cov, cov.T):
                raise ValueError("covariance must be a symmetric d x d matrix")
            if np.linalg.eigvalsh(cov).min() < -1e-12:
                raise ValueError("covariance must be positive semidefinite")
        if self.family == "uniform_box" and not self.low < self.high:
            raise ValueError("uniform box needs low < high")
        if self.family == "custom" and self.sampler not in SAMPLERS:
            raise ValueError(f"unknown custom sampler {self.sampler!r}")

    def mean_vector(self) -> np.ndarray:
        return np.zeros(self.d) if self.mean is None else np.asarray(self.mean, dtype=float)

    def cov_matrix(self) -> np.ndarray:
        return np.eye(self.d) if self.cov is None else np.asarray(self.cov, dtype=float)


@dataclass(frozen=True)
class SampleMatrix:
    data: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim == 1:
            data = data[:, None]
        if not np.all(np.isfinite(data)):
            raise ValueError("sample matrix has non-finite entries")
        object.__setattr__(self, "data", data)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class CfEstimate:
    points: np.ndarray
    values: np.ndarray
    n: int

    def __post_init__(self):
        if np.any(np.abs(self.values) > 1 + 3 / math.sqrt(self.n)):
            raise ValueError("characteristic function estimate exceeds its bound")


# --- sampling -------------------------------------------------------------------

def _chunk_rng(seed: int, stream: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream, chunk])))


def _draw(spec: RandomVectorSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    d = spec.d
    if spec.family == "gaussian":
        z = rng.standard_normal((n, d))
        w, v = np.linalg.eigh(spec.cov_matrix())
        root = v * np.sqrt(np.maximum(w, 0.0))
        return spec.mean_vector() + z @ root.T
    if spec.family == "uniform_box":
        return rng.uniform(spec.low, spec.high, (n, d))
    if spec.family == "laplace":
        return spec.mean_vector() + rng.laplace(0.0, spec.scale, (n, d))
    if spec.family == "degenerate":
        return np.broadcast_to(spec.mean_vector(), (n, d)).copy()
    return np.asarray(SAMPLERS[spec.sampler](rng, n, d), dtype=float).reshape(n, d)


def sample(spec: RandomVectorSpec, n: int, stream: int = 0, workers: int = 1) -> SampleMatrix:
    """``n`` draws in fixed-size chunks, each with its own counter-based stream.

    The output depends only on ``(spec.seed, stream, n)``, never on ``workers``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    starts = list(range(0, n, CHUNK))

    def job(k: int) -> np.ndarray:
        size = min(CHUNK, n - starts[k])
        return _draw(spec, _chunk_rng(spec.seed, stream, k), size)

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(job, range(len(starts))))
    else:
        parts = [job(k) for k in range(len(starts))]
    return SampleMatrix(np.concatenate(parts, axis=0),
                        {"family": spec.family, "seed": spec.seed, "stream": stream, "n": n})


def _as_array(m, d: int) -> np.ndarray:
    if hasattr(m, "to_numpy"):
        return m.to_numpy()
    arr = np.asarray(m, dtype=float)
    return arr * np.eye(d) if arr.ndim == 0 else arr


def simulate_linear_forms(specs: Sequence[RandomVectorSpec], bs: Sequence, cs: Sequence, n: int,
                          workers: int = 1) -> tuple[SampleMatrix, SampleMatrix]:
    """Draws of ``L1 = sum b_i^T X_i`` and ``L2 = sum c_i^T X_i``; ``X_i`` uses stream ``i``."""
    if not (len(specs) == len(bs) == len(cs)) or not specs:
        raise ValueError("specs, bs and cs must be nonempty and of equal length")
    d = specs[0].d
    l1 = np.zeros((n, d))
    l2 = np.zeros((n, d))
    for i, (spec, b, c) in enumerate(zip(specs, bs, cs)):
        x = sample(spec, n, stream=i, workers=workers).data
        l1 += x @ _as_array(b, d)
        l2 += x @ _as_array(c, d)
    prov = {"specs": [s.family for s in specs], "seeds": [s.seed for s in specs], "n": n}
    return SampleMatrix(l1, prov), SampleMatrix(l2, prov)


def load_csv(path: str) -> SampleMatrix:
    """Sample matrix from a CSV file with a header row of column names."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader if row]
    data = np.asarray(rows, dtype=float).reshape(-1, len(header))
    return SampleMatrix(data, {"source": path, "columns": header})


# --- characteristic functions -------------------------------------------------------

def empirical_cf(samples: SampleMatrix | np.ndarray, points) -> CfEstimate:
    """``(1/n) sum_j exp(i <t, X_j>)`` at each point ``t``."""
    data = samples.data if isinstance(samples, SampleMatrix) else np.asarray(samples, float)
    if data.ndim == 1:
        data = data[:, None]
    n, d = data.shape
    if n == 0:
        raise ValueError("empty sample")
    pts = np.asarray(points, dtype=float).reshape(-1, d)
    values = np.empty(pts.shape[0], dtype=complex)
    step = max(1, (1 << 22) // n)
    for start in range(0, pts.shape[0], step):
        block = pts[start:start + step]
        phase = data @ block.T
        values[start:start + step] = np.exp(1j * phase).mean(axis=0)
    values[np.all(pts == 0, axis=1)] = 1.0
    return CfEstimate(pts, values, n)


def skitovich_residual(specs: Sequence[RandomVectorSpec], bs: Sequence, cs: Sequence,
                       xs, ys, n: int) -> float:
    """``max |prod mu_i(b_i x + c_i y) - prod mu_i(b_i x) prod mu_i(c_i y)|`` over point pairs."""
    d = specs[0].d
    xs = np.asarray(xs, dtype=float).reshape(-1, d)
    ys = np.asarray(ys, dtype=float).reshape(-1, d)
    lhs = np.ones((xs.shape[0], ys.shape[0]), dtype=complex)
    px = np.ones(xs.shape[0], dtype=complex)
    py = np.ones(ys.shape[0], dtype=complex)
    for i, (spec, b, c) in enumerate(zip(specs, bs, cs)):
        data = sample(spec, n, stream=i)
        b, c = _as_array(b, d), _as_array(c, d)
        # <t, b^T X> = <b t, X>
        joint = ((xs @ b.T)[:, None, :] + (ys @ c.T)[None, :, :]).reshape(-1, d)
        cf_joint = empirical_cf(data, joint).values
        cf_x = empirical_cf(data, xs @ b.T).values
        cf_y = empirical_cf(data, ys @ c.T).values
        for vals in (cf_joint, cf_x, cf_y):
            if np.any(np.abs(vals) < MAGNITUDE_FLOOR):
                raise MagnitudeFloorError(f"|cf| < {MAGNITUDE_FLOOR} for summand {i + 1}")
        lhs *= cf_joint.reshape(xs.shape[0], ys.shape[0])
        px *= cf_x
        py *= cf_y
    return float(np.max(np.abs(lhs - px[:, None] * py[None, :])))


def _monomial_exponents(d: int, degree: int) -> list[tuple]:
    out = []

    def rec(prefix, left, k):
        if k == d:
            out.append(tuple(prefix))
            return
        for e in range(left + 1):
            rec(prefix + [e], left - e, k + 1)

    rec([], degree, 0)
    return sorted(out, key=lambda m: (sum(m), m))


def _rms_fit(pts: np.ndarray, target: np.ndarray, degree: int) -> tuple[np.ndarray, float]:
    monos = _monomial_exponents(pts.shape[1], degree)
    design = np.stack([np.prod(pts ** np.array(m), axis=1) for m in monos], axis=1).astype(complex)
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    resid = design @ coef - target
    return coef, float(np.sqrt(np.mean(np.abs(resid) ** 2)))


def marcinkiewicz_fit(cf: CfEstimate, max_degree: int = 6) -> dict:
    """Least-squares polynomial fits of ``-log cf``.

    ``quadratic_excess`` is the RMS residual of the degree-2 fit minus that of
    the degree-``max_degree`` fit; a Gaussian leaves nothing beyond degree two.
    """
    if max_degree < 2:
        raise ValueError("max_degree must be at least 2")
    if np.any(np.abs(cf.values) < MAGNITUDE_FLOOR):
        raise MagnitudeFloorError(f"|cf| < {MAGNITUDE_FLOOR}: logarithm outside the trusted zone")
    target = -np.log(cf.values)
    pts = np.asarray(cf.points, dtype=float)
    coef2, res2 = _rms_fit(pts, target, 2)
    coef_max, res_max = _rms_fit(pts, target, max_degree)
    return {
        "coefficients": coef_max,
        "quadratic_coefficients": coef2,
        "residual_quadratic": res2,
        "residual_max_degree": res_max,
        "quadratic_excess": max(res2 - res_max, 0.0),
    }


# --- distance correlation -----------------------------------------------------------

@njit(cache=True)
def _prefix(tree, k):
    acc = 0.0
    while k > 0:
        acc += tree[k]
        k -= k & (-k)
    return acc


@njit(cache=True)
def _bump(tree, k, v):
    n = tree.shape[0] - 1
    while k <= n:
        tree[k] += v
        k += k & (-k)


@njit(cache=True)
def _cross_sum(x, y, ranks, nranks):
    """``sum_{i != j} |x_i - x_j| |y_i - y_j|`` for ``x`` sorted ascending.

    Fenwick trees over the y-ranks hold count, sum x, sum y and sum xy of the
    points already visited; ties in y contribute nothing.
    """
    n = x.shape[0]
    tc = np.zeros(nranks + 1)
    tx = np.zeros(nranks + 1)
    ty = np.zeros(nranks + 1)
    txy = np.zeros(nranks + 1)
    all_c = 0.0
    all_x = 0.0
    all_y = 0.0
    all_xy = 0.0
    total = 0.0
    for i in range(n):
        r = ranks[i]
        xi = x[i]
        yi = y[i]
        lc = _prefix(tc, r - 1)
        lx = _prefix(tx, r - 1)
        ly = _prefix(ty, r - 1)
        lxy = _prefix(txy, r - 1)
        gc = all_c - _prefix(tc, r)
        gx = all_x - _prefix(tx, r)
        gy = all_y - _prefix(ty, r)
        gxy = all_xy - _prefix(txy, r)
        total += xi * yi * lc - xi * ly - yi * lx + lxy
        total -= xi * yi * gc - xi * gy - yi * gx + gxy
        _bump(tc, r, 1.0)
        _bump(tx, r, xi)
        _bump(ty, r, yi)
        _bump(txy, r, xi * yi)
        all_c += 1.0
        all_x += xi
        all_y += yi
        all_xy += xi * yi
    return 2.0 * total


def _row_sums_1d(v: np.ndarray) -> np.ndarray:
    order = np.argsort(v, kind="stable")
    s = v[order]
    n = s.shape[0]
    prefix = np.concatenate(([0.0], np.cumsum(s)))
    k = np.arange(n)
    left = s * k - prefix[:-1]
    right = (prefix[-1] - prefix[1:]) - s * (n - k - 1)
    out = np.empty(n)
    out[order] = left + right
    return out


def _dense_ranks(v: np.ndarray) -> tuple[np.ndarray, int]:
    uniq, inv = np.unique(v, return_inverse=True)
    return (inv + 1).astype(np.int64), uniq.shape[0]


class _FastDcov:
    """Distance covariance of two univariate samples in O(n log n) per permutation."""

    def __init__(self, x: np.ndarray, y: np.ndarray):
        x = x - x.mean()
        y = y - y.mean()
        self.n = x.shape[0]
        self.order = np.argsort(x, kind="stable")
        self.xs = np.ascontiguousarray(x[self.order])
        self.y = y
        self.y_ranks, self.nranks = _dense_ranks(y)
        self.ax = _row_sums_1d(x)
        self.by = _row_sums_1d(y)
        self.a_total = self.ax.sum()
        self.b_total = self.by.sum()
        self.xx = self._dcov_self(x)
        self.yy = self._dcov_self(y)

    def _dcov_self(self, v: np.ndarray) -> float:
        order = np.argsort(v, kind="stable")
        s = np.ascontiguousarray(v[order])
        ranks, nr = _dense_ranks(s)
        cross = _cross_sum(s, s, ranks, nr)
        rows = _row_sums_1d(v)
        n = self.n
        return cross / n ** 2 - 2 * (rows @ rows) / n ** 3 + rows.sum() ** 2 / n ** 4

    def dcov2(self, perm: np.ndarray | None = None) -> float:
        idx = self.order if perm is None else perm[self.order]
        ys = np.ascontiguousarray(self.y[idx])
        ranks = np.ascontiguousarray(self.y_ranks[idx])
        cross = _cross_sum(self.xs, ys, ranks, self.nranks)
        by = self.by if perm is None else self.by[perm]
        n = self.n
        return cross / n ** 2 - 2 * (self.ax @ by) / n ** 3 + self.a_total * self.b_total / n ** 4

    def dcor(self, dcov2: float) -> float:
        denom = math.sqrt(self.xx * self.yy)
        return math.sqrt(max(dcov2, 0.0) / denom) if denom > 0 else 0.0


def _centered_distances(v: np.ndarray) -> np.ndarray:
    dist = np.linalg.norm(v[:, None, :] - v[None, :, :], axis=2)
    return dist - dist.mean(axis=0) - dist.mean(axis=1)[:, None] + dist.mean()


def dcor_dense(x: np.ndarray, y: np.ndarray) -> float:
    """Distance correlation by the O(n^2) double-centering definition."""
    x = np.asarray(x, dtype=float).reshape(len(x), -1)
    y = np.asarray(y, dtype=float).reshape(len(y), -1)
    a, b = _centered_distances(x), _centered_distances(y)
    xy, xx, yy = (a * b).mean(), (a * a).mean(), (b * b).mean()
    return math.sqrt(max(xy, 0.0) / math.sqrt(xx * yy)) if xx * yy > 0 else 0.0


def independence_test(l1: SampleMatrix, l2: SampleMatrix, permutations: int = PERMUTATIONS,
                      seed: int = 0) -> dict:
    """Distance-correlation test with a seeded permutation p-value.

    Univariate samples use the O(n log n) algorithm on the full sample;
    multivariate samples are subsampled to ``EXACT_DCOV_LIMIT`` rows.
    """
    x = l1.data if isinstance(l1, SampleMatrix) else np.asarray(l1, float).reshape(len(l1), -1)
    y = l2.data if isinstance(l2, SampleMatrix) else np.asarray(l2, float).reshape(len(l2), -1)
    n = x.shape[0]
    if y.shape[0] != n:
        raise ValueError("samples must have equal size")
    if n < MIN_TEST_SIZE:
        raise ValueError(f"need at least {MIN_TEST_SIZE} rows")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, 0xDC0])))
    if x.shape[1] == 1 and y.shape[1] == 1:
        fast = _FastDcov(x[:, 0], y[:, 0])
        observed = fast.dcov2()
        exceed = sum(fast.dcov2(rng.permutation(n)) >= observed for _ in range(permutations))
        stat = fast.dcor(observed)
        method = "fast-1d"
    else:
        if n > EXACT_DCOV_LIMIT:
            keep = rng.choice(n, EXACT_DCOV_LIMIT, replace=False)
            x, y = x[keep], y[keep]
            n = EXACT_DCOV_LIMIT
        a, b = _centered_distances(x), _centered_distances(y)
        observed = (a * b).mean()
        exceed = 0
        for _ in range(permutations):
            p = rng.permutation(n)
            exceed += (a * b[np.ix_(p, p)]).mean() >= observed
        denom = math.sqrt((a * a).mean() * (b * b).mean())
        stat = math.sqrt(max(observed, 0.0) / denom) if denom > 0 else 0.0
        method = "dense-subsample"
    return {
        "statistic": stat,
        "p_value": (1 + int(exceed)) / (1 + permutations),
        "permutations": permutations,
        "n": n,
        "method": method,
    }


# --- end-to-end experiment ------------------------------------------------------------

GO_FAMILIES = {
    "gaussian": dict(family="gaussian"),
    "uniform": dict(family="uniform_box", low=-1.0, high=1.0),
    "laplace": dict(family="laplace", scale=1.0),
}


def ghurye_olkin_run(family: str, n: int = 100_000, seed: int = 0, permutations: int = PERMUTATIONS,
                     cf_points: int = 41, cf_half_width: float = 1.0, max_degree: int = 6) -> dict:
    """Two i.i.d. scalars, forms ``L1 = X1 + X2`` and ``L2 = X1 - X2``.

    The forms are independent exactly in the Gaussian case; other families are
    expected to be flagged by the independence test, the product residual or
    the quadratic fit.
    """
    if family not in GO_FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {sorted(GO_FAMILIES)}")
    specs = [RandomVectorSpec(1, seed=seed, **GO_FAMILIES[family]) for _ in range(2)]
    bs, cs = [1.0, 1.0], [1.0, -1.0]
    l1, l2 = simulate_linear_forms(specs, bs, cs, n)
    indep = independence_test(l1, l2, permutations, seed)
    grid = np.linspace(-1.0, 1.0, 5)
    resid = skitovich_residual(specs, bs, cs, grid, grid, n)
    ts = np.linspace(-cf_half_width, cf_half_width, cf_points)
    fit = marcinkiewicz_fit(empirical_cf(sample(specs[0], n, stream=0), ts), max_degree)
    budget = 5 / math.sqrt(n)
    dependence = indep["statistic"] >= 0.02 or indep["p_value"] <= 0.005
    product_flag = resid > budget
    excess_flag = fit["quadratic_excess"] > budget
    return {
        "family": family,
        "n": n,
        "seed": seed,
        "independence": indep,
        "skitovich_residual": resid,
        "quadratic_excess": fit["quadratic_excess"],
        "noise_budget": budget,
        "dependence_flag": dependence,
        "product_flag": product_flag,
        "excess_flag": excess_flag,
        "failure_flagged": dependence or product_flag,
    }
