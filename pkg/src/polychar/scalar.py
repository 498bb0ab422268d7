"""Exact scalars: rationals, Gaussian rationals and the exponential group algebra.

``ExpCoeff`` is a finite formal sum ``sum_z c_z * E(z)`` standing for
``sum_z c_z * e^z``.  Exponents and coefficients are Gaussian rationals.  For
distinct algebraic exponents the exponentials are linearly independent over
the algebraic numbers (Lindemann-Weierstrass), so an ``ExpCoeff`` is zero
exactly when its canonical term map is empty.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Union

import gmpy2

mpq = gmpy2.mpq
RationalLike = Union[int, Fraction, "gmpy2.mpq", str]


class NonExactError(ValueError):
    """A value would leave the exact Gaussian-rational representation."""


def rational(value) -> "gmpy2.mpq":
    """Coerce ``value`` to an exact rational.

    Floats are refused: a float literal almost never denotes the rational a
    caller has in mind, and the downstream rank computations must be exact.
    """
    if isinstance(value, bool):
        return mpq(int(value))
    if isinstance(value, mpq):
        return value
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.lower():
            return mpq(Fraction(text))
        return mpq(text)
    if isinstance(value, Rational):
        return mpq(int(value.numerator), int(value.denominator))
    if isinstance(value, GaussianRational):
        if value.im:
            raise NonExactError(f"{value} is not real")
        return value.re
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_rational(q) -> str:
    q = rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class GaussianRational:
    """Exact complex number ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", rational(re))
        object.__setattr__(self, "im", rational(im))

    @classmethod
    def _raw(cls, re, im) -> "GaussianRational":
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            raise TypeError("complex floats are not exact; build a GaussianRational")
        return cls._raw(rational(value), _ZERO_Q)

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    def __reduce__(self):
        return (GaussianRational, (Fraction(int(self.re.numerator), int(self.re.denominator)),
                                   Fraction(int(self.im.numerator), int(self.im.denominator))))

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        return GaussianRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __sub__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        return GaussianRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussianRational._raw(a * c, _ZERO_Q)
        return GaussianRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "GaussianRational":
        norm = self.re * self.re + self.im * self.im
        if not norm:
            raise ZeroDivisionError("GaussianRational division by zero")
        return GaussianRational._raw(self.re / norm, -self.im / norm)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self.re, -self.im)

    # comparison -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction, mpq)):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def sort_key(self):
        return (self.re, self.im)

    @property
    def is_real(self) -> bool:
        return not self.im

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({format_rational(self.re)}, {format_rational(self.im)})"

    def __str__(self):
        re, im = self.re, self.im
        if not im:
            return format_rational(re)
        im_txt = _imag_text(im)
        if not re:
            return im_txt
        sign = "-" if im < 0 else "+"
        return f"{format_rational(re)}{sign}{_imag_text(abs(im))}"


def _imag_text(im) -> str:
    if im == 1:
        return "i"
    if im == -1:
        return "-i"
    return f"{format_rational(im)}i"


_ZERO_Q = mpq(0)
ZERO = GaussianRational._raw(mpq(0), mpq(0))
ONE = GaussianRational._raw(mpq(1), mpq(0))
I = GaussianRational._raw(mpq(0), mpq(1))
_I_POWERS = (ONE, I, -ONE, -I)


def gaussian(value) -> GaussianRational:
    """Coerce ints, rationals, strings like ``"1/2"`` or pairs ``(re, im)``."""
    if isinstance(value, tuple) and len(value) == 2:
        return GaussianRational(*value)
    return GaussianRational.coerce(value)


def _exp_key(z: GaussianRational):
    return (z.re, z.im)


class ExpCoeff:
    """Element ``sum_z c_z E(z)`` of the group algebra of Gaussian-rational exponents.

    Instances are immutable and canonical: no zero coefficient is stored.
    Arithmetic accepts ints, rationals and :class:`GaussianRational` on
    either side.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[GaussianRational, GaussianRational] = {}
        for z, c in items:
            z = GaussianRational.coerce(z)
            c = GaussianRational.coerce(c)
            prev = acc.get(z)
            acc[z] = c if prev is None else prev + c
        self._terms = {z: c for z, c in acc.items() if c}
        self._hash = None

    @classmethod
    def _clean(cls, terms: dict) -> "ExpCoeff":
        """Wrap a dict already known to be canonical (no zero values)."""
        obj = object.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c) -> "ExpCoeff":
        c = GaussianRational.coerce(c)
        return cls._clean({ZERO: c} if c else {})

    @classmethod
    def exp(cls, z, coeff=1, turns=0) -> "ExpCoeff":
        """``coeff * e^(z + 2*pi*i*turns)`` folded into canonical form.

        ``turns`` must be a multiple of 1/4, so that ``e^(2*pi*i*turns)`` is
        one of 1, i, -1, -i; anything else has no exact representation here.
        """
        z = GaussianRational.coerce(z)
        c = GaussianRational.coerce(coeff)
        turns = rational(turns)
        if turns:
            quarter = turns * 4
            if quarter.denominator != 1:
                raise NonExactError(
                    f"e^(2*pi*i*{format_rational(turns)}) is not a Gaussian rational")
            c = c * _I_POWERS[int(quarter) % 4]
        return cls._clean({z: c} if c else {})

    # inspection -------------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and ZERO in self._terms)

    def constant_value(self) -> GaussianRational:
        if not self._terms:
            return ZERO
        if not self.is_constant():
            raise NonExactError(f"{self} is not a Gaussian rational")
        return self._terms[ZERO]

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def leading(self):
        z = max(self._terms, key=_exp_key)
        return z, self._terms[z]

    def trailing(self):
        z = min(self._terms, key=_exp_key)
        return z, self._terms[z]

    # arithmetic ---------------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "ExpCoeff | None":
        if isinstance(other, ExpCoeff):
            return other
        try:
            return ExpCoeff.const(other)
        except TypeError:
            return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for z, c in other._terms.items():
            prev = out.get(z)
            if prev is None:
                out[z] = c
            else:
                s = prev + c
                if s:
                    out[z] = s
                else:
                    del out[z]
        return ExpCoeff._clean(out)

    __radd__ = __add__

    def __neg__(self):
        return ExpCoeff._clean({z: -c for z, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, ExpCoeff):
            a, b = self._terms, other._terms
            if not a or not b:
                return ZERO_EXP
            if len(a) == 1 and len(b) == 1:
                (za, ca), = a.items()
                (zb, cb), = b.items()
                return ExpCoeff._clean({za + zb: ca * cb})
            out: dict = {}
            for za, ca in a.items():
                for zb, cb in b.items():
                    z = za + zb
                    prev = out.get(z)
                    out[z] = ca * cb if prev is None else prev + ca * cb
            return ExpCoeff._clean({z: c for z, c in out.items() if c})
        try:
            s = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.scale(s)

    __rmul__ = __mul__

    def scale(self, s: GaussianRational) -> "ExpCoeff":
        if not s:
            return ZERO_EXP
        return ExpCoeff._clean({z: c * s for z, c in self._terms.items()})

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            if isinstance(n, int) and self.is_monomial():
                return self.unit_inverse() ** (-n)
            return NotImplemented
        result, base = ONE_EXP, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def unit_inverse(self) -> "ExpCoeff":
        """Inverse of a unit ``c*E(z)``; other elements are not invertible."""
        if not self.is_monomial():
            raise ZeroDivisionError(f"{self} is not a unit of the exponential group algebra")
        (z, c), = self._terms.items()
        return ExpCoeff._clean({-z: c.inverse()})

    def exact_div(self, other: "ExpCoeff") -> "ExpCoeff":
        """Quotient ``self / other`` when it exists in the group algebra.

        Leading-term division under the lexicographic order on exponents;
        raises :class:`ArithmeticError` when the division is not exact.
        """
        if not other._terms:
            raise ZeroDivisionError("division by zero ExpCoeff")
        if not self._terms:
            return ZERO_EXP
        if other.is_monomial():
            return self * other.unit_inverse()
        lz_b, lc_b = other.leading()
        lc_b_inv = lc_b.inverse()
        floor = _exp_key(self.trailing()[0] - other.trailing()[0])
        quotient: dict = {}
        rem = dict(self._terms)
        limit = 64 * (len(self._terms) + 1) * (len(other._terms) + 1) + 4096
        while rem:
            limit -= 1
            if limit < 0:
                raise ArithmeticError("exact division did not terminate")
            lz_r = max(rem, key=_exp_key)
            qz = lz_r - lz_b
            if _exp_key(qz) < floor:
                raise ArithmeticError(f"{self} is not divisible by {other}")
            qc = rem[lz_r] * lc_b_inv
            quotient[qz] = qc
            for zb, cb in other._terms.items():
                z = qz + zb
                v = rem.get(z, ZERO) - qc * cb
                if v:
                    rem[z] = v
                else:
                    rem.pop(z, None)
        return ExpCoeff._clean(quotient)

    # comparison / evaluation ---------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, ExpCoeff):
            return self._terms == other._terms
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __complex__(self):
        return self.evaluate()

    def evaluate(self) -> complex:
        total = 0j
        for z, c in self._terms.items():
            total += complex(c) * cmath.exp(complex(z))
        return total

    def sorted_items(self):
        return sorted(self._terms.items(), key=lambda zc: _exp_key(zc[0]))

    def __repr__(self):
        return f"ExpCoeff({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for z, c in self.sorted_items():
            coeff = f"({c})"
            parts.append(coeff if not z else f"{coeff}*E({z})")
        return " + ".join(parts)


ZERO_EXP = ExpCoeff._clean({})
ONE_EXP = ExpCoeff._clean({ZERO: ONE})
