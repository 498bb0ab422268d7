"""Polynomials and exponential polynomials with ExpCoeff coefficients.

An :class:`ExpPolynomial` in ``n`` variables is a canonical finite sum
``sum_k p_k(x) * exp(<lambda_k, x>)``: frequencies are pairwise distinct and
no mode carries the zero polynomial.  Because the coefficients live in the
exponential group algebra, translating by a rational vector stays exact:
``exp(<lambda, x + h>)`` contributes the scalar ``E(<lambda, h>)``.

Frequencies are Gaussian-rational vectors, optionally extended by a rational
multiple of ``2*pi*i`` per coordinate (``turns``).  The extension exists so
periodic exponentials such as ``exp(2*pi*i*x/delta)`` can be represented; a
translation that would produce a non-quarter turn raises
:class:`~polychar.scalar.NonExactError`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from math import comb
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .linalg import RationalMatrix
from .scalar import (
    ONE,
    ONE_EXP,
    ZERO,
    ZERO_EXP,
    ExpCoeff,
    GaussianRational,
    format_rational,
    mpq,
    rational,
)

Monomial = tuple
NEG_INF = -math.inf


class DimensionError(ValueError):
    """Operands live in different numbers of variables."""


# --- coefficient accumulators ---------------------------------------------------
# A slot is a mutable dict exponent -> GaussianRational used while building a
# coefficient; _finish turns a mono -> slot map into canonical ExpCoeffs.

def _slot_add_scaled(slot: dict, c: ExpCoeff, s: GaussianRational) -> None:
    for z, v in c._terms.items():
        w = v * s
        prev = slot.get(z)
        slot[z] = w if prev is None else prev + w


def _slot_add_product(slot: dict, c1: ExpCoeff, c2: ExpCoeff) -> None:
    for za, ca in c1._terms.items():
        for zb, cb in c2._terms.items():
            z = zb if not za else (za if not zb else za + zb)
            w = ca * cb
            prev = slot.get(z)
            slot[z] = w if prev is None else prev + w


def _finish(acc: dict) -> dict:
    out = {}
    for mono, slot in acc.items():
        clean = {z: v for z, v in slot.items() if v}
        if clean:
            out[mono] = ExpCoeff._clean(clean)
    return out


def _coerce_coeff(c) -> ExpCoeff:
    if isinstance(c, ExpCoeff):
        return c
    return ExpCoeff.const(c)


# --- rational-coefficient helper polynomials (dict mono -> GaussianRational) ---

def _dmul(p: dict, q: dict) -> dict:
    out: dict = {}
    for m1, a in p.items():
        for m2, b in q.items():
            m = tuple(x + y for x, y in zip(m1, m2))
            w = a * b
            prev = out.get(m)
            out[m] = w if prev is None else prev + w
    return {m: v for m, v in out.items() if v}


class Polynomial:
    """Polynomial in ``nvars`` variables with :class:`ExpCoeff` coefficients."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms=()):
        items = terms.items() if isinstance(terms, dict) else terms
        acc: dict = {}
        for mono, c in items:
            mono = tuple(int(e) for e in mono)
            if len(mono) != nvars or any(e < 0 for e in mono):
                raise DimensionError(f"bad monomial {mono} for {nvars} variables")
            c = _coerce_coeff(c)
            acc[mono] = acc[mono] + c if mono in acc else c
        self.nvars = nvars
        self._terms = {m: c for m, c in acc.items() if c}
        self._hash = None

    @classmethod
    def _clean(cls, nvars: int, terms: dict) -> "Polynomial":
        obj = object.__new__(cls)
        obj.nvars = nvars
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._clean(nvars, {})

    @classmethod
    def const(cls, nvars: int, c=1) -> "Polynomial":
        c = _coerce_coeff(c)
        return cls._clean(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def var(cls, nvars: int, k: int) -> "Polynomial":
        mono = tuple(1 if j == k else 0 for j in range(nvars))
        return cls._clean(nvars, {mono: ONE_EXP})

    @classmethod
    def monomial(cls, exponents: Sequence[int], c=1) -> "Polynomial":
        return cls(len(exponents), {tuple(exponents): c})

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

    @property
    def degree(self):
        """Total degree, or ``-inf`` for the zero polynomial."""
        if not self._terms:
            return NEG_INF
        return max(sum(m) for m in self._terms)

    def degree_in(self, block: Sequence[int]):
        """Largest total degree in the variables listed in ``block``."""
        if not self._terms:
            return NEG_INF
        return max(sum(m[k] for k in block) for m in self._terms)

    def coefficient(self, mono) -> ExpCoeff:
        return self._terms.get(tuple(mono), ZERO_EXP)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def has_rational_coefficients(self) -> bool:
        return all(c.is_constant() for c in self._terms.values())

    # ring operations ------------------------------------------------------------
    def _check(self, other: "Polynomial"):
        if self.nvars != other.nvars:
            raise DimensionError(f"{self.nvars} vs {other.nvars} variables")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            try:
                other = Polynomial.const(self.nvars, other)
            except TypeError:
                return NotImplemented
        self._check(other)
        if not other._terms:
            return self
        out = dict(self._terms)
        for m, c in other._terms.items():
            prev = out.get(m)
            if prev is None:
                out[m] = c
            else:
                s = prev + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Polynomial._clean(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._clean(self.nvars, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            try:
                other = Polynomial.const(self.nvars, other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return Polynomial.const(self.nvars, other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            try:
                return self.scale(_coerce_coeff(other))
            except TypeError:
                return NotImplemented
        self._check(other)
        acc: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = tuple(x + y for x, y in zip(m1, m2))
                slot = acc.get(mono)
                if slot is None:
                    slot = acc[mono] = {}
                _slot_add_product(slot, c1, c2)
        return Polynomial._clean(self.nvars, _finish(acc))

    def __rmul__(self, other):
        try:
            return self.scale(_coerce_coeff(other))
        except TypeError:
            return NotImplemented

    def scale(self, c: ExpCoeff) -> "Polynomial":
        if not c:
            return Polynomial.zero(self.nvars)
        if c == ONE_EXP:
            return self
        out = {}
        for m, v in self._terms.items():
            w = v * c
            if w:
                out[m] = w
        return Polynomial._clean(self.nvars, out)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result, base = Polynomial.const(self.nvars, 1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # analysis ---------------------------------------------------------------
    def derivative(self, k: int) -> "Polynomial":
        out = {}
        for m, c in self._terms.items():
            e = m[k]
            if e:
                mono = m[:k] + (e - 1,) + m[k + 1:]
                out[mono] = c * e
        return Polynomial._clean(self.nvars, out)

    def affine_substitute(self, rows: Sequence[Sequence], shift: Sequence | None = None,
                          new_nvars: int | None = None) -> "Polynomial":
        """``p(A z + shift)`` with ``A`` given as ``nvars`` rows of rationals."""
        n_new = len(rows[0]) if new_nvars is None else new_nvars
        if len(rows) != self.nvars:
            raise DimensionError("substitution matrix has the wrong number of rows")
        zero_mono = (0,) * n_new
        forms = []
        for j, row in enumerate(rows):
            form: dict = {}
            for k, a in enumerate(row):
                a = GaussianRational.coerce(a)
                if a:
                    form[tuple(1 if t == k else 0 for t in range(n_new))] = a
            if shift is not None:
                s = GaussianRational.coerce(shift[j])
                if s:
                    form[zero_mono] = s
            forms.append(form)
        powers = [[{zero_mono: ONE}] for _ in forms]

        def power(j, e):
            cache = powers[j]
            while len(cache) <= e:
                cache.append(_dmul(cache[-1], forms[j]))
            return cache[e]

        acc: dict = {}
        for mono, c in self._terms.items():
            expansion = {zero_mono: ONE}
            for j, e in enumerate(mono):
                if e:
                    expansion = _dmul(expansion, power(j, e))
            for m, r in expansion.items():
                slot = acc.get(m)
                if slot is None:
                    slot = acc[m] = {}
                _slot_add_scaled(slot, c, r)
        return Polynomial._clean(n_new, _finish(acc))

    def translate(self, h: Sequence) -> "Polynomial":
        """``p(x + h)`` for a rational shift ``h``."""
        if len(h) != self.nvars:
            raise DimensionError("shift vector has the wrong length")
        h = [rational(v) for v in h]
        if not any(h):
            return self
        acc: dict = {}
        # binomial expansion per variable: (x_j + h_j)^e
        tables = {}
        for mono, c in self._terms.items():
            pieces = [((0,), ONE)]
            for j, e in enumerate(mono):
                key = (j, e)
                if key not in tables:
                    hj = h[j]
                    tables[key] = [(k, GaussianRational.coerce(comb(e, k) * hj ** (e - k)))
                                   for k in range(e + 1) if hj or k == e]
                nxt = []
                for prefix, r in pieces:
                    for k, w in tables[key]:
                        nxt.append((prefix + (k,), r * w))
                pieces = nxt
            for prefix, r in pieces:
                m = prefix[1:]
                slot = acc.get(m)
                if slot is None:
                    slot = acc[m] = {}
                _slot_add_scaled(slot, c, r)
        return Polynomial._clean(self.nvars, _finish(acc))

    def evaluate(self, point: Sequence[complex]) -> complex:
        total = 0j
        for m, c in self._terms.items():
            term = c.evaluate()
            for x, e in zip(point, m):
                if e:
                    term *= x ** e
            total += term
        return total

    def sorted_items(self):
        return sorted(self._terms.items(), key=lambda mc: (-sum(mc[0]), tuple(-e for e in mc[0])))

    def __repr__(self):
        return f"Polynomial({render_polynomial(self)!r})"

    def __str__(self):
        return render_polynomial(self)


@dataclass(frozen=True)
class Frequency:
    """Frequency vector ``lam + 2*pi*i*turns`` of an exponential mode."""

    lam: tuple
    turns: tuple

    @classmethod
    def of(cls, lam: Iterable, turns: Iterable | None = None) -> "Frequency":
        lam = tuple(GaussianRational.coerce(v) for v in lam)
        turns = tuple(rational(v) for v in turns) if turns is not None else (mpq(0),) * len(lam)
        if len(turns) != len(lam):
            raise DimensionError("turns and lam lengths differ")
        return cls(lam, turns)

    @classmethod
    def zero(cls, n: int) -> "Frequency":
        return _zero_frequency(n)

    @property
    def dim(self) -> int:
        return len(self.lam)

    def is_zero(self) -> bool:
        return not any(self.lam) and not any(self.turns)

    def has_turns(self) -> bool:
        return any(self.turns)

    def __add__(self, other: "Frequency") -> "Frequency":
        return Frequency(tuple(a + b for a, b in zip(self.lam, other.lam)),
                         tuple(a + b for a, b in zip(self.turns, other.turns)))

    def __neg__(self):
        return Frequency(tuple(-a for a in self.lam), tuple(-a for a in self.turns))

    def pair(self, h: Sequence) -> ExpCoeff:
        """The scalar ``e^<freq, h>`` for a rational vector ``h``."""
        z = ZERO
        t = mpq(0)
        for a, tk, hk in zip(self.lam, self.turns, h):
            if hk:
                z = z + a * hk
                t = t + tk * hk
        return ExpCoeff.exp(z, 1, t)

    def pullback(self, rows: Sequence[Sequence], new_nvars: int) -> "Frequency":
        """Frequency of ``exp(<freq, A z>)`` as a function of ``z``, i.e. ``A^T freq``."""
        lam = []
        turns = []
        for k in range(new_nvars):
            s = ZERO
            t = mpq(0)
            for j, row in enumerate(rows):
                a = row[k]
                if a:
                    s = s + self.lam[j] * a
                    t = t + self.turns[j] * a
            lam.append(s)
            turns.append(t)
        return Frequency(tuple(lam), tuple(turns))

    def split(self, d: int) -> tuple["Frequency", "Frequency"]:
        return (Frequency(self.lam[:d], self.turns[:d]), Frequency(self.lam[d:], self.turns[d:]))

    def concat(self, other: "Frequency") -> "Frequency":
        return Frequency(self.lam + other.lam, self.turns + other.turns)

    def as_complex(self) -> np.ndarray:
        return np.array([complex(a) + 2j * math.pi * float(t) for a, t in zip(self.lam, self.turns)])

    def sort_key(self):
        return (not self.is_zero(), tuple((a.re, a.im) for a in self.lam), self.turns)

    def __str__(self):
        return render_linear_form(self, [f"x{k + 1}" for k in range(self.dim)])


_ZERO_FREQ_CACHE: dict = {}


def _zero_frequency(n: int) -> Frequency:
    f = _ZERO_FREQ_CACHE.get(n)
    if f is None:
        f = _ZERO_FREQ_CACHE[n] = Frequency((ZERO,) * n, (mpq(0),) * n)
    return f


class Classification(NamedTuple):
    is_polynomial: bool
    degree: float | int | None


class ExpPolynomial:
    """Canonical exponential polynomial ``sum_k p_k(x) exp(<lambda_k, x>)``."""

    __slots__ = ("nvars", "_modes", "_hash")

    def __init__(self, nvars: int, modes=()):
        self.nvars = nvars
        self._modes = _normalize_modes(nvars, modes.items() if isinstance(modes, dict) else modes)
        self._hash = None

    def _new(self, modes: dict):
        obj = object.__new__(type(self))
        obj.nvars = self.nvars
        obj._modes = modes
        obj._hash = None
        self._copy_extra(obj)
        return obj

    def _copy_extra(self, obj) -> None:
        pass

    @classmethod
    def zero(cls, nvars: int) -> "ExpPolynomial":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, c=1) -> "ExpPolynomial":
        return cls(nvars, [(Frequency.zero(nvars), Polynomial.const(nvars, c))])

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "ExpPolynomial":
        return cls(p.nvars, [(Frequency.zero(p.nvars), p)])

    @classmethod
    def variable(cls, nvars: int, k: int) -> "ExpPolynomial":
        return cls.from_polynomial(Polynomial.var(nvars, k))

    @classmethod
    def exponential(cls, lam: Sequence, turns: Sequence | None = None, poly: Polynomial | None = None):
        freq = Frequency.of(lam, turns)
        n = freq.dim
        return cls(n, [(freq, poly if poly is not None else Polynomial.const(n, 1))])

    # inspection -------------------------------------------------------------
    @property
    def modes(self) -> dict:
        return dict(self._modes)

    def items(self):
        return self._modes.items()

    def __len__(self):
        return len(self._modes)

    def is_zero(self) -> bool:
        return not self._modes

    def __bool__(self):
        return bool(self._modes)

    def mode(self, freq: Frequency) -> Polynomial:
        return self._modes.get(freq, Polynomial.zero(self.nvars))

    def frequencies(self) -> list[Frequency]:
        return sorted(self._modes, key=Frequency.sort_key)

    def polynomial_part(self) -> Polynomial:
        return self.mode(Frequency.zero(self.nvars))

    def is_polynomial(self) -> bool:
        return all(f.is_zero() for f in self._modes)

    def classify(self) -> Classification:
        return classify(self)

    # ring operations --------------------------------------------------------------
    def _check(self, other: "ExpPolynomial"):
        if self.nvars != other.nvars:
            raise DimensionError(f"{self.nvars} vs {other.nvars} variables")

    def _lift(self, other):
        if isinstance(other, ExpPolynomial):
            self._check(other)
            return other
        if isinstance(other, Polynomial):
            return ExpPolynomial.from_polynomial(other)
        return ExpPolynomial.constant(self.nvars, other)

    def __add__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        if not other._modes:
            return self
        out = dict(self._modes)
        for f, p in other._modes.items():
            prev = out.get(f)
            if prev is None:
                out[f] = p
            else:
                s = prev + p
                if s:
                    out[f] = s
                else:
                    del out[f]
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        return self._new({f: -p for f, p in self._modes.items()})

    def __sub__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, (ExpPolynomial, Polynomial)):
            try:
                return self.scale(_coerce_coeff(other))
            except TypeError:
                return NotImplemented
        other = self._lift(other)
        out: dict = {}
        for f1, p1 in self._modes.items():
            for f2, p2 in other._modes.items():
                f = f1 + f2
                prod = p1 * p2
                prev = out.get(f)
                out[f] = prod if prev is None else prev + prod
        return self._new({f: p for f, p in out.items() if p})

    def __rmul__(self, other):
        try:
            return self.scale(_coerce_coeff(other))
        except TypeError:
            return NotImplemented

    def scale(self, c: ExpCoeff) -> "ExpPolynomial":
        out = {}
        for f, p in self._modes.items():
            q = p.scale(c)
            if q:
                out[f] = q
        return self._new(out)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = self._new({Frequency.zero(self.nvars): Polynomial.const(self.nvars, 1)})
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, ExpPolynomial):
            return self.nvars == other.nvars and self._modes == other._modes
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._modes.items())))
        return self._hash

    # transformations ----------------------------------------------------------------
    def translate(self, h: Sequence) -> "ExpPolynomial":
        """Exact ``f(x + h)`` for a rational vector ``h``."""
        if len(h) != self.nvars:
            raise DimensionError("shift vector has the wrong length")
        h = [rational(v) for v in h]
        out = {}
        for f, p in self._modes.items():
            q = p.translate(h)
            if not f.is_zero():
                q = q.scale(f.pair(h))
            if q:
                out[f] = q
        return self._new(out)

    def linear_substitute(self, rows: Sequence[Sequence], new_nvars: int | None = None,
                          cls=None, **extra) -> "ExpPolynomial":
        """``f(A z)`` where ``A`` has ``nvars`` rows of exact rationals."""
        if isinstance(rows, RationalMatrix):
            rows = rows.rows
        if len(rows) != self.nvars:
            raise DimensionError("substitution matrix has the wrong number of rows")
        n_new = len(rows[0]) if new_nvars is None else new_nvars
        rows = [[rational(v) for v in r] for r in rows]
        out: dict = {}
        for f, p in self._modes.items():
            g = f.pullback(rows, n_new) if not f.is_zero() else Frequency.zero(n_new)
            q = p.affine_substitute(rows, None, n_new)
            prev = out.get(g)
            out[g] = q if prev is None else prev + q
        cls = cls or ExpPolynomial
        obj = cls.__new__(cls)
        obj.nvars = n_new
        obj._modes = {g: q for g, q in out.items() if q}
        obj._hash = None
        for k, v in extra.items():
            setattr(obj, k, v)
        return obj

    def evaluate(self, point: Sequence) -> complex:
        return evaluate(self, point)

    def evaluator(self):
        """Vectorised float evaluator: ``(n, nvars)`` array -> complex array."""
        modes = []
        for f, p in self._modes.items():
            monos = np.array(list(p._terms.keys()), dtype=np.int64).reshape(-1, self.nvars)
            coeffs = np.array([c.evaluate() for c in p._terms.values()], dtype=complex)
            modes.append((f.as_complex(), f.is_zero(), monos, coeffs))

        def fn(points):
            pts = np.atleast_2d(np.asarray(points, dtype=complex))
            total = np.zeros(pts.shape[0], dtype=complex)
            for lam, zero, monos, coeffs in modes:
                powers = np.prod(pts[:, None, :] ** monos[None, :, :], axis=2)
                values = powers @ coeffs
                if not zero:
                    values = values * np.exp(pts @ lam)
                total += values
            return total

        return fn

    def __repr__(self):
        return f"{type(self).__name__}({render(self)!r})"

    def __str__(self):
        return render(self)


def _normalize_modes(nvars: int, items) -> dict:
    out: dict = {}
    for f, p in items:
        if not isinstance(f, Frequency):
            f = Frequency.of(f)
        if isinstance(p, ExpCoeff) or not isinstance(p, Polynomial):
            p = Polynomial.const(nvars, p)
        if f.dim != nvars or p.nvars != nvars:
            raise DimensionError(f"mode dimension mismatch (expected {nvars})")
        prev = out.get(f)
        out[f] = p if prev is None else prev + p
    return {f: p for f, p in out.items() if p}


def normal_form(raw: Iterable[tuple[Frequency, Polynomial]], nvars: int | None = None) -> ExpPolynomial:
    """Merge duplicate frequencies and drop zero modes."""
    raw = list(raw)
    if nvars is None:
        if not raw:
            raise ValueError("nvars is required for an empty mode list")
        nvars = raw[0][1].nvars if isinstance(raw[0][1], Polynomial) else Frequency.of(raw[0][0]).dim
    return ExpPolynomial(nvars, raw)


def classify(e: ExpPolynomial) -> Classification:
    """``(is_polynomial, degree)``; the zero function has degree ``-inf``."""
    if not e.is_polynomial():
        return Classification(False, None)
    return Classification(True, e.polynomial_part().degree)


def evaluate(e: ExpPolynomial, point: Sequence) -> complex:
    """Float evaluation ``sum p_k(x) exp(<lambda_k, x>)``."""
    pt = [complex(v) for v in point]
    if len(pt) != e.nvars:
        raise DimensionError("point has the wrong dimension")
    total = 0j
    for f, p in e._modes.items():
        val = p.evaluate(pt)
        if not f.is_zero():
            val *= cmath.exp(sum(complex(a) * x for a, x in zip(f.lam, pt))
                             + 2j * math.pi * sum(float(t) * x for t, x in zip(f.turns, pt)))
        total += val
    return total


# --- rendering ------------------------------------------------------------------

def _paren_gaussian(c: GaussianRational) -> str:
    return f"({c})" if c.im else str(c)


def render_coefficient(c: ExpCoeff) -> str:
    if c.is_constant():
        v = c.constant_value()
        return _paren_gaussian(v) if not v.im else f"({v})"
    return f"({c})"


def render_monomial(mono, names) -> str:
    parts = []
    for name, e in zip(names, mono):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _join_signed(pieces: list[tuple[bool, str]]) -> str:
    if not pieces:
        return "0"
    neg, text = pieces[0]
    out = f"-{text}" if neg else text
    for neg, text in pieces[1:]:
        out += f" - {text}" if neg else f" + {text}"
    return out


def _term_piece(c: ExpCoeff, mono_text: str) -> tuple[bool, str]:
    if c.is_constant() and c.constant_value().is_real:
        v = c.constant_value().re
        neg = v < 0
        mag = abs(v)
        if not mono_text:
            return neg, format_rational(mag)
        if mag == 1:
            return neg, mono_text
        return neg, f"{format_rational(mag)}*{mono_text}"
    coeff = render_coefficient(c)
    return False, coeff if not mono_text else f"{coeff}*{mono_text}"


def render_polynomial(p: Polynomial, names: Sequence[str] | None = None) -> str:
    names = names or [f"x{k + 1}" for k in range(p.nvars)]
    return _join_signed([_term_piece(c, render_monomial(m, names)) for m, c in p.sorted_items()])


def render_linear_form(f: Frequency, names: Sequence[str]) -> str:
    pieces = []
    for name, a, t in zip(names, f.lam, f.turns):
        if a:
            if a.is_real:
                neg = a.re < 0
                mag = abs(a.re)
                pieces.append((neg, name if mag == 1 else f"{format_rational(mag)}*{name}"))
            else:
                pieces.append((False, f"({a})*{name}"))
        if t:
            two_t = 2 * t
            neg = two_t < 0
            mag = abs(two_t)
            lead = "" if mag == 1 else f"{format_rational(mag)}*"
            pieces.append((neg, f"{lead}pi*i*{name}"))
    return _join_signed(pieces)


def render(e: ExpPolynomial, names: Sequence[str] | None = None) -> str:
    """Canonical text, parseable by :func:`polychar.dsl.parse_exppoly`."""
    names = names or default_names(e)
    pieces = []
    for f in e.frequencies():
        p = e._modes[f]
        poly_text = render_polynomial(p, names)
        if f.is_zero():
            pieces.append(poly_text)
            continue
        lin = render_linear_form(f, names)
        if p == Polynomial.const(p.nvars, 1):
            pieces.append(f"exp({lin})")
        else:
            pieces.append(f"exp({lin})*({poly_text})")
    if not pieces:
        return "0"
    return " + ".join(pieces)


def default_names(e) -> list[str]:
    d = getattr(e, "d", None)
    if d is not None and e.nvars == 2 * d:
        return [f"x{k + 1}" for k in range(d)] + [f"y{k + 1}" for k in range(d)]
    return [f"x{k + 1}" for k in range(e.nvars)]
