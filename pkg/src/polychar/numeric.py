"""Float grid residuals of functional equations for arbitrary callables.

Callables take an ``(n, d)`` array of points and return ``n`` (possibly
complex) values.  :meth:`ExpPolynomial.evaluator` produces such callables, so
symbolic data can be cross-checked here.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Callable, Mapping

import numpy as np
from numpy.polynomial import chebyshev

DEFAULT_POINTS = 21
DEFAULT_HALF_WIDTH = 2.0
AGREEMENT_TOL = 1e-8


@dataclass(frozen=True)
class Grid:
    axes: tuple
    tol: float = AGREEMENT_TOL

    def __post_init__(self):
        axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        if not axes or any(a.ndim != 1 or a.shape[0] < 2 for a in axes):
            raise ValueError("each axis needs at least two sample points")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def uniform(cls, d: int, points: int = DEFAULT_POINTS, half_width: float = DEFAULT_HALF_WIDTH,
                tol: float = AGREEMENT_TOL) -> "Grid":
        axis = np.linspace(-half_width, half_width, points)
        return cls(tuple(axis for _ in range(d)), tol)

    @property
    def d(self) -> int:
        return len(self.axes)

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass(frozen=True)
class Summand:
    fid: str
    b: np.ndarray
    c: np.ndarray
    weight: float = 1.0


@dataclass(frozen=True)
class EquationSpec:
    """``sum_k w_k f_k(b_k x + c_k y)`` against a right-hand side.

    ``rhs`` is one of ``zero``, ``tensor-sum`` (``sum w_k f_k(b_k x) + sum w_k f_k(c_k y)``),
    ``f_of_z`` (``f_{rhs_fid}(x)``) or ``separated`` with degrees ``(r, s)``.
    """

    summands: tuple
    rhs: str = "zero"
    rhs_fid: str | None = None
    r: int = 0
    s: int = 0

    def __post_init__(self):
        if self.rhs not in ("zero", "tensor-sum", "f_of_z", "separated"):
            raise ValueError(f"unknown rhs mode {self.rhs!r}")
        if self.rhs == "f_of_z" and self.rhs_fid is None:
            raise ValueError("f_of_z needs rhs_fid")
        summands = tuple(
            Summand(s.fid, np.atleast_2d(np.asarray(s.b, dtype=float)),
                    np.atleast_2d(np.asarray(s.c, dtype=float)), float(s.weight))
            if isinstance(s, Summand) else
            Summand(s[0], np.atleast_2d(np.asarray(s[1], dtype=float)),
                    np.atleast_2d(np.asarray(s[2], dtype=float)), float(s[3]) if len(s) > 3 else 1.0)
            for s in self.summands)
        object.__setattr__(self, "summands", summands)


def frechet_spec(m: int, fid: str = "f", d: int = 1) -> EquationSpec:
    """``sum_{i=0}^m C(m,i) (-1)^(m-i) f(x + i y) = 0``."""
    eye = np.eye(d)
    return EquationSpec(tuple(Summand(fid, eye, i * eye, comb(m, i) * (-1) ** (m - i))
                              for i in range(m + 1)))


def _call(fn: Callable, pts: np.ndarray) -> np.ndarray:
    vals = np.asarray(fn(pts))
    if vals.shape != (pts.shape[0],):
        vals = vals.reshape(pts.shape[0])
    if not np.all(np.isfinite(vals)):
        raise ValueError("function returned non-finite values on the grid")
    return vals


def _field(spec: EquationSpec, fns: Mapping[str, Callable], xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """``(nx, ny)`` values of the left side minus the right side."""
    nx, ny = xs.shape[0], ys.shape[0]
    total = np.zeros((nx, ny), dtype=complex)
    for s in spec.summands:
        args = (xs @ s.b.T)[:, None, :] + (ys @ s.c.T)[None, :, :]
        total += s.weight * _call(fns[s.fid], args.reshape(nx * ny, -1)).reshape(nx, ny)
    if spec.rhs == "tensor-sum":
        for s in spec.summands:
            total -= s.weight * _call(fns[s.fid], xs @ s.b.T)[:, None]
            total -= s.weight * _call(fns[s.fid], ys @ s.c.T)[None, :]
    elif spec.rhs == "f_of_z":
        total -= _call(fns[spec.rhs_fid], xs)[:, None]
    return total


def _separated_shifts(d: int) -> list[np.ndarray]:
    shifts = [0.5 * np.eye(d)[j] for j in range(d)]
    if d > 1:
        shifts.append(np.full(d, 0.3))
    return shifts


def residual_max(spec: EquationSpec, fns: Mapping[str, Callable], x_grid: Grid, y_grid: Grid) -> float:
    """Largest ``|LHS - RHS|`` over all grid pairs.

    For the separated mode the residual is the largest mixed difference
    ``Delta_{(h,0)}^{r+1} Delta_{(0,k)}^{s+1}`` of the left side, which vanishes
    exactly on sums of the two separated families.
    """
    xs, ys = x_grid.points(), y_grid.points()
    if spec.rhs != "separated":
        return float(np.max(np.abs(_field(spec, fns, xs, ys))))
    plain = EquationSpec(spec.summands)
    worst = 0.0
    for h in _separated_shifts(xs.shape[1]):
        for k in _separated_shifts(ys.shape[1]):
            acc = np.zeros((xs.shape[0], ys.shape[0]), dtype=complex)
            for i in range(spec.r + 2):
                for j in range(spec.s + 2):
                    w = comb(spec.r + 1, i) * comb(spec.s + 1, j) * (-1) ** (spec.r + 1 - i + spec.s + 1 - j)
                    acc += w * _field(plain, fns, xs + i * h, ys + j * k)
            worst = max(worst, float(np.max(np.abs(acc))))
    return worst


def rotation_matrix(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def knw_residual_numeric(f: Callable, n: int, rhs_mode: str = "f_of_z", grid: Grid | None = None,
                         h_grid: Grid | None = None) -> float:
    """Largest ``|(1/N) sum_k f(z + w^k h) - RHS|`` over grid pairs ``(z, h)``."""
    if n < 2:
        raise ValueError("N must be at least 2")
    if rhs_mode not in ("f_of_z", "zero"):
        raise ValueError(f"unknown rhs_mode {rhs_mode!r}")
    grid = grid or Grid.uniform(2)
    h_grid = h_grid or grid
    summands = tuple(Summand("f", np.eye(2), rotation_matrix(2 * np.pi * k / n), 1.0 / n) for k in range(n))
    spec = EquationSpec(summands, rhs_mode, "f" if rhs_mode == "f_of_z" else None)
    return residual_max(spec, {"f": f}, grid, h_grid)


def cos_period(delta: float) -> Callable:
    def f(pts):
        return np.cos(2 * np.pi * np.asarray(pts, dtype=float)[..., 0] / delta)
    return f


def lstsq_normal_fit(x: np.ndarray, y: np.ndarray, degree: int) -> tuple[np.ndarray, float]:
    """Least-squares polynomial fit by normal equations with column scaling.

    Works in the variable ``u`` mapped affinely onto ``[-1, 1]``; returns the
    coefficients in ``u`` and the max fit error.
    """
    lo, hi = float(x.min()), float(x.max())
    u = (2 * x - (lo + hi)) / (hi - lo)
    vander = np.vander(u, degree + 1, increasing=True)
    scale = np.linalg.norm(vander, axis=0)
    a = vander / scale
    coef = np.linalg.solve(a.T @ a, a.T @ y) / scale
    return coef, float(np.max(np.abs(vander @ coef - y)))


def chebyshev_fit_error(x: np.ndarray, y: np.ndarray, degree: int) -> float:
    """Max error of the least-squares fit in an orthogonal (Chebyshev) basis."""
    lo, hi = float(x.min()), float(x.max())
    u = (2 * x - (lo + hi)) / (hi - lo)
    coef = chebyshev.chebfit(u, y, degree)
    return float(np.max(np.abs(chebyshev.chebval(u, coef) - y)))


def d1_counterexample(delta: float, f: Callable | None = None, points: int = 1000,
                      degree: int = 10) -> dict:
    """Periodic function killed by ``Delta_{+delta}`` and ``Delta_{-delta}`` yet far from polynomial.

    ``f`` defaults to ``cos(2 pi x / delta)``.  The label is granted only when
    both shift residuals are at most 1e-10 and the best degree-``degree`` fit
    on ``[0, 5 delta]`` misses by at least 0.5.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    fn = f or cos_period(delta)
    xs = np.linspace(0.0, 5 * delta, points)
    base = _call(fn, xs[:, None])
    plus = float(np.max(np.abs(_call(fn, (xs + delta)[:, None]) - base)))
    minus = float(np.max(np.abs(_call(fn, (xs - delta)[:, None]) - base)))
    real = np.real(base)
    _, fit = lstsq_normal_fit(xs, real, degree)
    oracle = chebyshev_fit_error(xs, real, degree)
    return {
        "delta": delta,
        "residual_plus": plus,
        "residual_minus": minus,
        "poly_fit_error": fit,
        "poly_fit_error_oracle": oracle,
        "is_counterexample": plus <= 1e-10 and minus <= 1e-10 and fit >= 0.5,
    }
