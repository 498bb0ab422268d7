"""Recursive-descent parser for exponential-polynomial expressions.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := '-' factor | atom ('^' uint)?
    atom   := rational | imag | 'i' | var | 'exp' '(' expr ')' | 'E' '(' expr ')' | '(' expr ')'

Rationals are ``p``, ``p/q`` or decimals; ``3/4i`` is an imaginary literal.
``exp`` takes an argument that is linear in the variables; ``pi`` may appear
there only in multiples of ``pi*i`` (periodic frequencies).  ``E(z)`` is the
constant ``e^z`` for a Gaussian-rational ``z``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .bivar import BiExpPolynomial
from .exppoly import ExpPolynomial, Frequency, Polynomial
from .linalg import RationalMatrix
from .scalar import I, ExpCoeff, GaussianRational, mpq, rational


class DSLError(ValueError):
    def __init__(self, message: str, pos: int | None = None, text: str = ""):
        where = f" at position {pos}" if pos is not None else ""
        super().__init__(f"{message}{where}" + (f": {text!r}" if text else ""))
        self.pos = pos


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d+)?(?:/\d+)?i?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*^(),])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise DSLError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), pos))
        pos = m.end()
    out.append(Token("end", "", pos))
    return out


class _Parser:
    def __init__(self, text: str, names: list[str], cls=ExpPolynomial, d: int | None = None):
        self.text = text
        self.tokens = tokenize(text)
        self.k = 0
        self.names = names
        self.nvars = len(names)
        self.cls = cls
        self.d = d
        self.in_exp = False

    # token helpers
    def peek(self) -> Token:
        return self.tokens[self.k]

    def take(self) -> Token:
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.take()
        if tok.text != text:
            raise DSLError(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.pos, self.text)
        return tok

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise DSLError(message, tok.pos, self.text)

    # value helpers; inside exp() an extra trailing variable stands for pi
    def width(self) -> int:
        return self.nvars + (1 if self.in_exp else 0)

    def const(self, c) -> ExpPolynomial:
        return ExpPolynomial.constant(self.width(), c)

    def parse(self):
        value = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            self.error(f"unexpected {tok.text!r}", tok)
        if self.cls is BiExpPolynomial:
            return BiExpPolynomial(self.d, value.items())
        return value

    def expr(self) -> ExpPolynomial:
        value = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> ExpPolynomial:
        value = self.factor()
        while self.peek().text == "*":
            self.take()
            value = value * self.factor()
        return value

    def factor(self) -> ExpPolynomial:
        if self.peek().text == "-":
            self.take()
            return -self.factor()
        if self.peek().text == "+":
            self.take()
            return self.factor()
        base = self.atom()
        if self.peek().text == "^":
            self.take()
            tok = self.take()
            if tok.kind != "num" or not tok.text.isdigit():
                self.error("exponent must be a non-negative integer", tok)
            base = base ** int(tok.text)
        return base

    def atom(self) -> ExpPolynomial:
        tok = self.take()
        if tok.kind == "num":
            text = tok.text
            imag = text.endswith("i")
            value = rational(text[:-1] if imag else text)
            return self.const(GaussianRational(0, value) if imag else value)
        if tok.text == "(":
            value = self.expr()
            self.expect(")")
            return value
        if tok.kind == "name":
            name = tok.text
            if name == "i":
                return self.const(I)
            if name == "pi":
                if not self.in_exp:
                    self.error("pi is only allowed inside exp()", tok)
                return ExpPolynomial.variable(self.width(), self.nvars)
            if name == "exp":
                return self.exp_call(tok)
            if name == "E":
                return self.e_call(tok)
            if name in self.names:
                return ExpPolynomial.variable(self.width(), self.names.index(name))
            self.error(f"unknown variable {name!r}", tok)
        self.error(f"unexpected {tok.text or 'end of input'!r}", tok)

    def _inner(self) -> ExpPolynomial:
        self.expect("(")
        outer = self.in_exp
        self.in_exp = True
        try:
            value = self.expr()
        finally:
            self.in_exp = outer
        self.expect(")")
        if not value.is_polynomial():
            self.error("exponent must not contain exp()")
        return value

    def e_call(self, tok: Token) -> ExpPolynomial:
        value = self._inner().polynomial_part()
        z, turns = self._split_constant(value, tok)
        allowed = ((0,) * (self.nvars + 1), (0,) * self.nvars + (1,))
        if any(mono not in allowed for mono in value._terms):
            self.error("E() takes a constant argument", tok)
        return self.const(ExpCoeff.exp(z, 1, turns))

    def _split_constant(self, p: Polynomial, tok: Token):
        n = self.nvars
        zero = (0,) * (n + 1)
        pi_only = (0,) * n + (1,)
        z = GaussianRational.coerce(0)
        turns = mpq(0)
        c = p._terms.get(zero)
        if c is not None:
            z = self._scalar(c, tok)
        c = p._terms.get(pi_only)
        if c is not None:
            turns = self._turns(self._scalar(c, tok), tok)
        return z, turns

    def _scalar(self, c: ExpCoeff, tok: Token) -> GaussianRational:
        if not c.is_constant():
            self.error("exponent coefficients must be Gaussian rationals", tok)
        return c.constant_value()

    def _turns(self, coeff: GaussianRational, tok: Token):
        # pi * coeff = 2 pi i t  ->  t = coeff / (2i)
        if coeff.re:
            self.error("pi may only appear as a multiple of pi*i", tok)
        return coeff.im / 2

    def exp_call(self, tok: Token) -> ExpPolynomial:
        value = self._inner().polynomial_part()
        n = self.nvars
        lam = [GaussianRational.coerce(0)] * n
        turns = [mpq(0)] * n
        for mono, c in value._terms.items():
            xs, pi_pow = mono[:n], mono[n]
            deg = sum(xs)
            if deg > 1 or pi_pow > 1:
                self.error("exp() argument must be linear in the variables", tok)
            if deg == 0:
                continue
            j = xs.index(1)
            if pi_pow:
                turns[j] = self._turns(self._scalar(c, tok), tok)
            else:
                lam[j] = self._scalar(c, tok)
        z, t = self._split_constant(value, tok)
        width = self.width()
        freq = Frequency.of(lam + [0] * (width - n), turns + [0] * (width - n))
        poly = Polynomial.const(width, ExpCoeff.exp(z, 1, t))
        return ExpPolynomial(width, [(freq, poly)])


def variable_names(d: int, block: bool = False) -> list[str]:
    names = [f"x{k + 1}" for k in range(d)]
    if block:
        names += [f"y{k + 1}" for k in range(d)]
    return names


def parse_exppoly(text: str, d: int) -> ExpPolynomial:
    """Parse an exponential polynomial in the variables ``x1..xd``."""
    if d < 1:
        raise DSLError("dimension must be positive")
    return _Parser(text, variable_names(d)).parse()


def parse_biexppoly(text: str, d: int) -> BiExpPolynomial:
    """Parse a two-block expression in ``x1..xd, y1..yd``."""
    return _Parser(text, variable_names(d, True), BiExpPolynomial, d).parse()


def parse_scalar(text: str) -> GaussianRational:
    value = _Parser(text, []).parse()
    if not value.is_polynomial():
        raise DSLError(f"expected a constant, got {text!r}")
    c = value.polynomial_part().coefficient(())
    if not c.is_constant():
        raise DSLError(f"expected a Gaussian rational, got {text!r}")
    return c.constant_value()


def parse_vector(text: str) -> list:
    try:
        return [rational(v.strip()) for v in text.split(",")]
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise DSLError(f"bad vector {text!r}: {exc}") from None


def parse_vectors(text: str) -> list[list]:
    return [parse_vector(part) for part in text.split(";") if part.strip()]


def parse_matrix(text: str, d: int | None = None) -> RationalMatrix:
    """``"1,0;0,1"`` row-major; a single entry is read as a scalar multiple of I_d."""
    rows = parse_vectors(text)
    if len(rows) == 1 and len(rows[0]) == 1 and d is not None and d > 1:
        return RationalMatrix.scalar(d, rows[0][0])
    if any(len(r) != len(rows[0]) for r in rows):
        raise DSLError(f"ragged matrix {text!r}")
    m = RationalMatrix(rows)
    if d is not None and m.shape != (d, d):
        raise DSLError(f"matrix {text!r} is not {d}x{d}")
    return m


def parse_list(text: str, sep: str = "|") -> list[str]:
    return [part.strip() for part in text.split(sep) if part.strip()]
