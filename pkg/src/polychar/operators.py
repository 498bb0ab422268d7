"""Translation, difference and dilation operators on exponential polynomials."""

from __future__ import annotations

from math import comb
from typing import Sequence

from .exppoly import DimensionError, ExpPolynomial, Polynomial
from .linalg import RationalMatrix, SingularMatrixError, exp_rank, field_rank, rref
from .scalar import ONE, ZERO, ExpCoeff, GaussianRational, rational


class UnivariatePoly:
    """``a_0 + a_1 z + ... + a_n z^n`` with Gaussian-rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence = ()):
        cs = [GaussianRational.coerce(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def z_minus_one_pow(cls, m: int) -> "UnivariatePoly":
        return cls([(-1) ** (m - k) * comb(m, k) for k in range(m + 1)])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __mul__(self, other: "UnivariatePoly") -> "UnivariatePoly":
        if not self.coeffs or not other.coeffs:
            return UnivariatePoly()
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return UnivariatePoly(out)

    def __call__(self, z):
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def root_one_multiplicity(self) -> int:
        """Multiplicity of the root ``z = 1``."""
        cs = list(self.coeffs)
        m = 0
        while cs and not sum(cs, ZERO):
            # synthetic division by (z - 1)
            q = [ZERO] * (len(cs) - 1)
            carry = ZERO
            for k in range(len(cs) - 1, 0, -1):
                carry = carry + cs[k]
                q[k - 1] = carry
            cs = q
            m += 1
        return m

    def __eq__(self, other):
        if isinstance(other, UnivariatePoly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"UnivariatePoly({[str(c) for c in self.coeffs]})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c:
                mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
                coef = f"({c})" if c.im else str(c)
                parts.append(coef if not mono else (mono if c == ONE else f"{coef}*{mono}"))
        return " + ".join(parts)


def _as_exppoly(f) -> ExpPolynomial:
    if isinstance(f, Polynomial):
        return ExpPolynomial.from_polynomial(f)
    return f


def translate(f: ExpPolynomial, y: Sequence) -> ExpPolynomial:
    """``x -> f(x + y)``."""
    return _as_exppoly(f).translate(y)


def difference_pow(f: ExpPolynomial, y: Sequence, m: int = 1) -> ExpPolynomial:
    """``(tau_y - 1)^m f`` through the binomial expansion."""
    if m < 0:
        raise ValueError("m must be non-negative")
    f = _as_exppoly(f)
    y = [rational(v) for v in y]
    if len(y) != f.nvars:
        raise DimensionError("shift vector has the wrong length")
    total = ExpPolynomial.zero(f.nvars)
    for i in range(m + 1):
        coeff = (-1) ** (m - i) * comb(m, i)
        total = total + f.translate([i * v for v in y]) * coeff
    return total


def difference_iterated(f: ExpPolynomial, y: Sequence, m: int = 1) -> ExpPolynomial:
    """``Delta_y`` applied ``m`` times in sequence."""
    f = _as_exppoly(f)
    for _ in range(m):
        f = f.translate(y) - f
    return f


def dilate(f: ExpPolynomial, b) -> ExpPolynomial:
    """``x -> f(b x)`` for an invertible rational matrix ``b``."""
    f = _as_exppoly(f)
    b = _matrix(b, f.nvars)
    if not b.is_invertible():
        raise SingularMatrixError("dilation matrix is singular")
    return f.linear_substitute(b.rows, f.nvars)


def _matrix(b, d: int) -> RationalMatrix:
    if isinstance(b, RationalMatrix):
        m = b
    elif isinstance(b, (list, tuple)):
        m = RationalMatrix(b)
    else:
        m = RationalMatrix.scalar(d, b)
    if m.shape != (d, d):
        raise DimensionError(f"expected a {d}x{d} matrix")
    return m


def apply_q_of_translation(q: UnivariatePoly, y: Sequence, f: ExpPolynomial) -> ExpPolynomial:
    """``q(tau_y) f = sum_k a_k f(x + k y)``."""
    f = _as_exppoly(f)
    y = [rational(v) for v in y]
    total = ExpPolynomial.zero(f.nvars)
    for k, a in enumerate(q.coeffs):
        if a:
            total = total + f.translate([k * v for v in y]).scale(ExpCoeff.const(a))
    return total


def _pure_polynomial(p) -> Polynomial:
    if isinstance(p, Polynomial):
        return p
    if not p.is_polynomial():
        raise ValueError("translate span requires a polynomial without exponential modes")
    return p.polynomial_part()


def _all_derivatives(p: Polynomial) -> list[Polynomial]:
    seen = {p} if p else set()
    frontier = [p] if p else []
    out = list(frontier)
    while frontier:
        nxt = []
        for q in frontier:
            for k in range(q.nvars):
                r = q.derivative(k)
                if r and r not in seen:
                    seen.add(r)
                    nxt.append(r)
                    out.append(r)
        frontier = nxt
    return out


def translate_span(p) -> list[Polynomial]:
    """Basis of ``span{p(x + a)}``, drawn from the partial derivatives of ``p``.

    ``p(x + a) = sum_beta a^beta / beta! * D^beta p(x)``, so the translates and
    the derivatives span the same space.
    """
    p = _pure_polynomial(p)
    if not p:
        return []
    derivs = _all_derivatives(p)
    monos = sorted({m for q in derivs for m in q._terms})
    rows = [[q.coefficient(m) for m in monos] for q in derivs]
    _, prow, _ = exp_rank(rows)
    basis = [derivs[i] for i in prow]
    return sorted(basis, key=lambda q: (q.degree, q.sorted_items()[0][0]))


def translate_span_dim(p) -> int:
    return len(translate_span(p))


def _coordinates(basis: list[Polynomial], targets: list[Polynomial]) -> list[list]:
    """Coordinates of each target in ``basis`` (rational coefficients only)."""
    monos = sorted({m for q in basis + targets for m in q._terms})
    n = len(basis)
    rows = [[q.coefficient(m).constant_value() for q in basis + targets] for m in monos]
    reduced, pivots = rref(rows)
    if pivots[:n] != list(range(n)) or any(pc >= n for pc in pivots):
        raise ArithmeticError("target lies outside the span of the basis")
    return [[reduced[i][n + t] for i in range(n)] for t in range(len(targets))]


def translation_matrix(p, h: Sequence) -> tuple[list[Polynomial], list[list]]:
    """Basis of the translate span and the matrix of ``tau_h`` on it (columns = images)."""
    p = _pure_polynomial(p)
    basis = translate_span(p)
    images = [b.translate(h) for b in basis]
    coords = _coordinates(basis, images)
    n = len(basis)
    return basis, [[coords[j][i] for j in range(n)] for i in range(n)]


def translation_min_poly(p, h: Sequence) -> UnivariatePoly:
    """Minimal polynomial of ``tau_h`` on the translate span of ``p``.

    It is always ``(z - 1)^m``; ``m`` is the first power at which the kernel of
    ``(tau_h - 1)^m`` fills the span.  ``h = 0`` gives ``z - 1``.
    """
    p = _pure_polynomial(p)
    if not p:
        raise ValueError("the zero polynomial has an empty translate span")
    h = [rational(v) for v in h]
    if len(h) != p.nvars:
        raise DimensionError("shift vector has the wrong length")
    if not any(h):
        return UnivariatePoly.z_minus_one_pow(1)
    if not p.has_rational_coefficients():
        return UnivariatePoly.z_minus_one_pow(_nilpotency_by_differences(p, h))
    _, t = translation_matrix(p, h)
    n = len(t)
    nil = [[t[i][j] - (ONE if i == j else ZERO) for j in range(n)] for i in range(n)]
    power = nil
    m = 1
    while field_rank(power) > 0:
        if m >= n:
            raise ArithmeticError("tau_h - 1 is not nilpotent on the translate span")
        power = _matmul(power, nil)
        m += 1
    return UnivariatePoly.z_minus_one_pow(m)


def _nilpotency_by_differences(p: Polynomial, h) -> int:
    f = ExpPolynomial.from_polynomial(p)
    m = 0
    while f:
        f = f.translate(h) - f
        m += 1
    return m


def _matmul(a, b):
    cols = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), ZERO) for col in cols] for row in a]
