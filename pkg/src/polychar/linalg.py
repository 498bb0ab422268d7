"""Exact linear algebra over the rationals, Gaussian rationals and ExpCoeff.

Two elimination engines live here.  Matrices whose entries are all
Gaussian rationals are row reduced over that field.  Matrices carrying
genuine ``E(z)`` entries are handled by fraction-free Bareiss elimination in
the exponential group algebra, an integral domain, so ranks are ranks over
its fraction field.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .scalar import (
    ONE,
    ONE_EXP,
    ZERO,
    ZERO_EXP,
    ExpCoeff,
    format_rational,
    mpq,
    rational,
)


class SingularMatrixError(ValueError):
    """An operation required an invertible matrix."""


class RationalMatrix:
    """Exact rational matrix (usually square) with cached determinant."""

    __slots__ = ("rows", "shape", "_det")

    def __init__(self, rows: Iterable[Iterable]):
        rows = tuple(tuple(rational(v) for v in row) for row in rows)
        if not rows or not rows[0]:
            raise ValueError("matrix must be non-empty")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged matrix rows")
        self.rows = rows
        self.shape = (len(rows), width)
        self._det = None

    @classmethod
    def identity(cls, d: int) -> "RationalMatrix":
        return cls.scalar(d, 1)

    @classmethod
    def scalar(cls, d: int, c) -> "RationalMatrix":
        c = rational(c)
        return cls([[c if i == j else 0 for j in range(d)] for i in range(d)])

    @classmethod
    def diagonal(cls, entries: Sequence) -> "RationalMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n: int, m: int | None = None) -> "RationalMatrix":
        return cls([[0] * (n if m is None else m) for _ in range(n)])

    @property
    def is_square(self) -> bool:
        return self.shape[0] == self.shape[1]

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix(zip(*self.rows))

    def __matmul__(self, other):
        if isinstance(other, RationalMatrix):
            if self.shape[1] != other.shape[0]:
                raise ValueError("shape mismatch")
            cols = list(zip(*other.rows))
            return RationalMatrix(
                [[sum((a * b for a, b in zip(row, col)), mpq(0)) for col in cols] for row in self.rows])
        vec = [rational(v) for v in other]
        if len(vec) != self.shape[1]:
            raise ValueError("shape mismatch")
        return tuple(sum((a * b for a, b in zip(row, vec)), mpq(0)) for row in self.rows)

    def __add__(self, other: "RationalMatrix"):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return RationalMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "RationalMatrix"):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return RationalMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return RationalMatrix([[-a for a in r] for r in self.rows])

    def __mul__(self, c):
        c = rational(c)
        return RationalMatrix([[a * c for a in r] for r in self.rows])

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, RationalMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def hstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape[0] != other.shape[0]:
            raise ValueError("row count mismatch")
        return RationalMatrix([r + s for r, s in zip(self.rows, other.rows)])

    def det(self):
        if not self.is_square:
            raise ValueError("determinant of a non-square matrix")
        if self._det is None:
            self._det = _field_det([list(r) for r in self.rows])
        return self._det

    def is_invertible(self) -> bool:
        return self.det() != 0

    def inverse(self) -> "RationalMatrix":
        n = self.shape[0]
        if not self.is_square or not self.is_invertible():
            raise SingularMatrixError(f"matrix {self} is singular")
        aug = [list(r) + [mpq(1) if i == j else mpq(0) for j in range(n)]
               for i, r in enumerate(self.rows)]
        reduced, _ = rref(aug)
        return RationalMatrix([row[n:] for row in reduced[:n]])

    def commutes_with(self, other: "RationalMatrix") -> bool:
        return self @ other == other @ self

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(v) for v in r] for r in self.rows])

    def __repr__(self):
        return f"RationalMatrix({self})"

    def __str__(self):
        return ";".join(",".join(format_rational(v) for v in r) for r in self.rows)


def _field_det(m: list[list]):
    """Determinant by Gaussian elimination; works for any exact field entries."""
    n = len(m)
    det = 1
    m = [row[:] for row in m]
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c]), None)
        if p is None:
            return m[c][c]
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        piv = m[c][c]
        det = det * piv
        inv = 1 / piv
        for r in range(c + 1, n):
            f = m[r][c]
            if f:
                f = f * inv
                row_r, row_c = m[r], m[c]
                for k in range(c, n):
                    row_r[k] = row_r[k] - f * row_c[k]
    return det


def rref(rows: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over an exact field.

    Works for rational (mpq) or :class:`GaussianRational` entries.
    Returns the reduced rows (zero rows dropped) and the pivot columns.
    """
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv if v else v for v in m[r]]
        pivot_row = m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b if b else a for a, b in zip(m[i], pivot_row)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows: Sequence[Sequence], zero=ZERO, one=ONE) -> list[list]:
    """Basis of the right kernel ``{v : M v = 0}`` over an exact field."""
    if not rows:
        return []
    ncols = len(rows[0])
    reduced, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [zero] * ncols
        v[fcol] = one
        for row, pc in zip(reduced, pivots):
            v[pc] = -row[fcol]
        basis.append(v)
    return basis


def field_rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


# --- ExpCoeff ring ------------------------------------------------------------

def _all_constant(rows) -> bool:
    return all(e.is_constant() for row in rows for e in row)


def exp_rank(rows: Sequence[Sequence[ExpCoeff]]) -> tuple[int, list[int], list[int]]:
    """Rank over the fraction field of ExpCoeff, with pivot rows and columns.

    The pivot rows/columns index a nonsingular maximal minor.
    """
    rows = [list(r) for r in rows]
    if not rows or not rows[0]:
        return 0, [], []
    if _all_constant(rows):
        return _field_rank_pivots([[e.constant_value() for e in r] for r in rows])
    return _bareiss_rank(rows)


def _field_rank_pivots(rows):
    """Pivot rows and columns of a maximal nonsingular minor over a field."""
    m = [list(r) for r in rows]
    nrows, ncols = len(m), len(m[0])
    order = list(range(nrows))
    pivot_cols: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        order[r], order[p] = order[p], order[r]
        inv = 1 / m[r][c]
        pivot_row = m[r]
        for i in range(r + 1, nrows):
            f = m[i][c]
            if f:
                f = f * inv
                m[i] = [a - f * b if b else a for a, b in zip(m[i], pivot_row)]
        pivot_cols.append(c)
        r += 1
        if r == nrows:
            break
    return r, sorted(order[:r]), pivot_cols


def _bareiss_rank(rows: list[list[ExpCoeff]]):
    m = [list(r) for r in rows]
    nrows, ncols = len(m), len(m[0])
    order = list(range(nrows))
    pivot_cols: list[int] = []
    prev = ONE_EXP
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        order[r], order[p] = order[p], order[r]
        piv = m[r][c]
        for i in range(r + 1, nrows):
            f = m[i][c]
            row_i, row_r = m[i], m[r]
            for k in range(c + 1, ncols):
                v = piv * row_i[k] - f * row_r[k]
                row_i[k] = v.exact_div(prev) if v else v
            row_i[c] = ZERO_EXP
        prev = piv
        pivot_cols.append(c)
        r += 1
        if r == nrows:
            break
    return r, sorted(order[:r]), pivot_cols


def exp_det(rows: Sequence[Sequence[ExpCoeff]]) -> ExpCoeff:
    """Determinant in the exponential group algebra (fraction-free Bareiss)."""
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        return ONE_EXP
    if _all_constant(m):
        return ExpCoeff.const(_field_det([[e.constant_value() for e in r] for r in m]))
    sign = 1
    prev = ONE_EXP
    for c in range(n - 1):
        p = next((i for i in range(c, n) if m[i][c]), None)
        if p is None:
            return ZERO_EXP
        if p != c:
            m[c], m[p] = m[p], m[c]
            sign = -sign
        piv = m[c][c]
        for i in range(c + 1, n):
            f = m[i][c]
            for k in range(c + 1, n):
                v = piv * m[i][k] - f * m[c][k]
                m[i][k] = v.exact_div(prev) if v else v
            m[i][c] = ZERO_EXP
        prev = piv
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det


def exp_adjugate(rows: Sequence[Sequence[ExpCoeff]]) -> list[list[ExpCoeff]]:
    """Adjugate matrix, so that ``M @ adj(M) = det(M) * I``."""
    n = len(rows)
    if n == 1:
        return [[ONE_EXP]]
    adj = [[ZERO_EXP] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[rows[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            cof = exp_det(minor)
            adj[j][i] = cof if (i + j) % 2 == 0 else -cof
    return adj


def exp_matmul(a: Sequence[Sequence[ExpCoeff]], b: Sequence[Sequence[ExpCoeff]]) -> list[list[ExpCoeff]]:
    cols = list(zip(*b))
    out = []
    for row in a:
        out_row = []
        for col in cols:
            acc = ZERO_EXP
            for x, y in zip(row, col):
                if x and y:
                    acc = acc + x * y
            out_row.append(acc)
        out.append(out_row)
    return out


def rank_factorization(rows: Sequence[Sequence[ExpCoeff]]):
    """Factor ``den * M = A @ B`` with inner dimension ``rank(M)``.

    Returns ``(rank, A, B, den)``.  When every entry is a Gaussian rational
    the factorisation is the usual pivot-columns times RREF and ``den`` is
    one; otherwise ``A = M[:, J] adj(M[I, J])``, ``B = M[I, :]`` and ``den`` is
    the determinant of the pivot minor, folded away when it is a unit.
    """
    rows = [list(r) for r in rows]
    if not rows or not rows[0]:
        return 0, [], [], ONE_EXP
    if _all_constant(rows):
        consts = [[e.constant_value() for e in r] for r in rows]
        reduced, pivots = rref(consts)
        k = len(pivots)
        a = [[ExpCoeff.const(r[c]) for c in pivots] for r in consts]
        b = [[ExpCoeff.const(v) for v in r] for r in reduced]
        return k, a, b, ONE_EXP
    k, prow, pcol = _bareiss_rank(rows)
    if k == 0:
        return 0, [[] for _ in rows], [], ONE_EXP
    minor = [[rows[i][j] for j in pcol] for i in prow]
    den = exp_det(minor)
    adj = exp_adjugate(minor)
    a = exp_matmul([[r[j] for j in pcol] for r in rows], adj)
    b = [list(rows[i]) for i in prow]
    if den.is_monomial():
        inv = den.unit_inverse()
        a = [[e * inv for e in r] for r in a]
        den = ONE_EXP
    return k, a, b, den
