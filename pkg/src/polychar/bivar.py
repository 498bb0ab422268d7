"""Exponential polynomials on R^d x R^d.

A :class:`BiExpPolynomial` is an :class:`ExpPolynomial` in ``2d`` variables
whose first ``d`` coordinates form the x-block and last ``d`` the y-block.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import HypothesisError
from .exppoly import DimensionError, ExpPolynomial, Frequency, Polynomial
from .linalg import RationalMatrix, SingularMatrixError, rank_factorization
from .scalar import ONE_EXP, ZERO_EXP, ExpCoeff, rational


class BiExpPolynomial(ExpPolynomial):
    __slots__ = ("d",)

    def __init__(self, d: int, modes=()):
        super().__init__(2 * d, modes)
        self.d = d

    def _copy_extra(self, obj) -> None:
        obj.d = self.d

    @classmethod
    def zero(cls, d: int) -> "BiExpPolynomial":
        return cls(d)

    @classmethod
    def lift(cls, e: ExpPolynomial) -> "BiExpPolynomial":
        if e.nvars % 2:
            raise DimensionError("a two-block object needs an even number of variables")
        return cls(e.nvars // 2, e.items())

    def _lift(self, other):
        other = super()._lift(other)
        if isinstance(other, BiExpPolynomial) or other.nvars != self.nvars:
            return other
        return BiExpPolynomial.lift(other)

    def block_modes(self):
        """Iterate ``((freq_x, freq_y), polynomial)``."""
        for f, p in self._modes.items():
            yield f.split(self.d), p

    def at(self, x=None, y=None) -> ExpPolynomial:
        """Restrict one block to a rational point, giving a d-variable object."""
        if (x is None) == (y is None):
            raise ValueError("give exactly one of x, y")
        d = self.d
        if y is not None:
            shifted = self.translate([0] * d + [rational(v) for v in y])
            keep = range(d)
        else:
            shifted = self.translate([rational(v) for v in x] + [0] * d)
            keep = range(d, 2 * d)
        rows = [[1 if j == k - keep[0] else 0 for j in range(d)] if k in keep else [0] * d
                for k in range(2 * d)]
        return shifted.linear_substitute(rows, d)


def _as_matrix(b, d: int) -> RationalMatrix:
    if isinstance(b, RationalMatrix):
        m = b
    elif isinstance(b, (list, tuple)):
        m = RationalMatrix(b)
    else:
        m = RationalMatrix.scalar(d, b)
    if m.shape != (d, d):
        raise DimensionError(f"expected a {d}x{d} matrix")
    return m


def compose_linear(f: ExpPolynomial, b, c, require_invertible: bool = True) -> BiExpPolynomial:
    """``(x, y) -> f(b x + c y)``."""
    d = f.nvars
    b = _as_matrix(b, d)
    c = _as_matrix(c, d)
    if require_invertible:
        for name, m in (("b", b), ("c", c)):
            if not m.is_invertible():
                raise SingularMatrixError(f"{name} is singular")
    rows = [list(rb) + list(rc) for rb, rc in zip(b.rows, c.rows)]
    return f.linear_substitute(rows, 2 * d, cls=BiExpPolynomial, d=d)


def embed_x(f: ExpPolynomial) -> BiExpPolynomial:
    """``f(x) * 1(y)``."""
    d = f.nvars
    return compose_linear(f, RationalMatrix.identity(d), RationalMatrix.zeros(d), False)


def embed_y(f: ExpPolynomial) -> BiExpPolynomial:
    """``1(x) * f(y)``."""
    d = f.nvars
    return compose_linear(f, RationalMatrix.zeros(d), RationalMatrix.identity(d), False)


def tensor(p: ExpPolynomial, q: ExpPolynomial) -> BiExpPolynomial:
    """``P(x) * Q(y)``."""
    if p.nvars != q.nvars:
        raise DimensionError("tensor factors must share the dimension")
    return embed_x(p) * embed_y(q)


def block_difference(F: BiExpPolynomial, h1: Sequence, h2: Sequence) -> BiExpPolynomial:
    """``F(x + h1, y + h2) - F(x, y)``."""
    if len(h1) != F.d or len(h2) != F.d:
        raise DimensionError("block shifts must have length d")
    return F.translate(list(h1) + list(h2)) - F


# --- separable rank ------------------------------------------------------------

@dataclass(frozen=True)
class SeparableDecomposition:
    """``den * F(x, y) = sum_k u_k(y) v_k(x)``; ``den`` is 1 unless a non-unit pivot occurs."""

    rank: int
    us: list
    vs: list
    den: ExpCoeff = ONE_EXP

    def reconstruct(self) -> BiExpPolynomial:
        total = None
        for u, v in zip(self.us, self.vs):
            term = tensor(v, u)
            total = term if total is None else total + term
        if total is None:
            d = self.vs[0].nvars if self.vs else 0
            return BiExpPolynomial.zero(d)
        return total


def coefficient_matrix(F: BiExpPolynomial):
    """Coefficient matrix of F with rows ``(x-frequency, x-monomial)`` and columns
    ``(y-frequency, y-monomial)``."""
    d = F.d
    entries: dict = {}
    for (fx, fy), p in F.block_modes():
        for mono, c in p.items():
            entries[((fx, mono[:d]), (fy, mono[d:]))] = c
    row_keys = sorted({k[0] for k in entries}, key=_basis_key)
    col_keys = sorted({k[1] for k in entries}, key=_basis_key)
    rows = [[entries.get((rk, ck), ZERO_EXP) for ck in col_keys] for rk in row_keys]
    return row_keys, col_keys, rows


def _basis_key(key):
    freq, mono = key
    return (freq.sort_key(), sum(mono), mono)


def _basis_function(d: int, key, coeff: ExpCoeff) -> ExpPolynomial:
    freq, mono = key
    return ExpPolynomial(d, [(freq, Polynomial(d, {mono: coeff}))])


def separable_rank(F: BiExpPolynomial, witnesses: bool = True):
    """Minimal ``n`` with ``F(x, y) = sum_{k<=n} u_k(y) v_k(x)``.

    Returns a :class:`SeparableDecomposition` when ``witnesses`` is true,
    otherwise the integer rank.
    """
    d = F.d
    row_keys, col_keys, rows = coefficient_matrix(F)
    k, a, b, den = rank_factorization(rows)
    if not witnesses:
        return k
    vs = []
    us = []
    for t in range(k):
        v = ExpPolynomial.zero(d)
        for i, rk in enumerate(row_keys):
            if a[i][t]:
                v = v + _basis_function(d, rk, a[i][t])
        u = ExpPolynomial.zero(d)
        for j, ck in enumerate(col_keys):
            if b[t][j]:
                u = u + _basis_function(d, ck, b[t][j])
        vs.append(v)
        us.append(u)
    return SeparableDecomposition(k, us, vs, den)


# --- separated form ------------------------------------------------------------

@dataclass
class Membership:
    member: bool
    a: dict | None = None
    b: dict | None = None
    reason: str = ""

    def reconstruct(self, d: int) -> BiExpPolynomial:
        total = BiExpPolynomial.zero(d)
        for alpha, a_alpha in (self.a or {}).items():
            total = total + tensor(ExpPolynomial(d, [(Frequency.zero(d), Polynomial(d, {alpha: 1}))]), a_alpha)
        for beta, b_beta in (self.b or {}).items():
            total = total + tensor(b_beta, ExpPolynomial(d, [(Frequency.zero(d), Polynomial(d, {beta: 1}))]))
        return total


def separated_membership(F: BiExpPolynomial, r: int, s: int) -> Membership:
    """Decide ``F = sum_{|a|<=r} x^a A_a(y) + sum_{|b|<=s} B_b(x) y^b``.

    A mode whose x- and y-frequencies are both nonzero cannot occur on the
    right.  Otherwise each monomial is routed to the A side (needs
    ``|alpha| <= r`` and zero x-frequency) or the B side (needs ``|beta| <= s``
    and zero y-frequency).
    """
    if r < 0 or s < 0:
        raise ValueError("r and s must be non-negative")
    d = F.d
    a_parts: dict = {}
    b_parts: dict = {}
    for (fx, fy), p in F.block_modes():
        x_zero, y_zero = fx.is_zero(), fy.is_zero()
        if not x_zero and not y_zero:
            return Membership(False, reason=f"mode with x-frequency {fx} and y-frequency {fy}")
        for mono, c in p.items():
            alpha, beta = mono[:d], mono[d:]
            if x_zero and sum(alpha) <= r:
                a_parts.setdefault(alpha, []).append((fy, beta, c))
            elif y_zero and sum(beta) <= s:
                b_parts.setdefault(beta, []).append((fx, alpha, c))
            else:
                return Membership(False, reason=f"monomial x^{alpha} y^{beta} exceeds r={r}, s={s}")
    a = {alpha: ExpPolynomial(d, [(f, Polynomial(d, {m: c})) for f, m, c in parts])
         for alpha, parts in a_parts.items()}
    b = {beta: ExpPolynomial(d, [(f, Polynomial(d, {m: c})) for f, m, c in parts])
         for beta, parts in b_parts.items()}
    return Membership(True, a, b)


# --- the cascade of joint differences -------------------------------------------

def check_c_hypotheses(cs: Sequence[RationalMatrix]) -> None:
    for i, c in enumerate(cs):
        if not c.is_invertible():
            raise HypothesisError(f"c_{i + 1} is singular")
    for i in range(len(cs)):
        for j in range(i + 1, len(cs)):
            if not (cs[i] - cs[j]).is_invertible():
                raise HypothesisError(f"c_{i + 1} - c_{j + 1} is singular")


@dataclass
class CascadeResult:
    """States of the cascade; ``states[k]`` follows the k-th joint difference."""

    states: list
    survivors: list
    shifts: list = field(default_factory=list)

    @property
    def final(self) -> BiExpPolynomial:
        return self.states[-1]


def reduction_cascade(fs: Sequence[ExpPolynomial], cs: Sequence, hs: Sequence[Sequence]) -> CascadeResult:
    """Apply ``Delta_{(h_k, -c_k^{-1} h_k)}`` for ``k = 1..m-1`` to ``sum f_i(x + c_i y)``.

    Step ``k`` removes the k-th summand and replaces each later ``f_i`` by
    ``Delta_{(I - c_i c_k^{-1}) h_k} f_i``; ``survivors[k][i]`` records these.
    """
    m = len(fs)
    if m == 0:
        raise ValueError("need at least one summand")
    if len(cs) != m or len(hs) != m - 1:
        raise ValueError("need m matrices and m-1 shift vectors")
    d = fs[0].nvars
    cs = [_as_matrix(c, d) for c in cs]
    check_c_hypotheses(cs)
    ident = RationalMatrix.identity(d)
    state = BiExpPolynomial.zero(d)
    for f, c in zip(fs, cs):
        state = state + compose_linear(f, ident, c)
    states = [state]
    current = list(fs)
    survivors = [list(current)]
    shifts = []
    for k in range(m - 1):
        h = [rational(v) for v in hs[k]]
        ck_inv = cs[k].inverse()
        y_shift = [-v for v in ck_inv @ h]
        shifts.append((h, y_shift))
        state = block_difference(state, h, y_shift)
        nxt = list(current)
        nxt[k] = ExpPolynomial.zero(d)
        for i in range(k + 1, m):
            g_shift = (ident - cs[i] @ ck_inv) @ h
            nxt[i] = current[i].translate(g_shift) - current[i]
        current = nxt
        states.append(state)
        survivors.append(list(current))
    return CascadeResult(states, survivors, shifts)
