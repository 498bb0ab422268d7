"""Seeded generators and independent sympy oracles shared by the tests."""

from __future__ import annotations

import random
from fractions import Fraction

import sympy as sp

from polychar.exppoly import ExpPolynomial, Frequency, Polynomial
from polychar.scalar import ExpCoeff, GaussianRational, mpq


def rand_rational(rng: random.Random, bound: int = 3, dens=(1, 2, 3)) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.choice(dens))


def rand_nonzero(rng: random.Random, bound: int = 3, dens=(1, 2, 3)) -> Fraction:
    while True:
        v = rand_rational(rng, bound, dens)
        if v:
            return v


def rand_gaussian(rng: random.Random, complex_prob: float = 0.3) -> GaussianRational:
    re = rand_rational(rng)
    im = rand_rational(rng) if rng.random() < complex_prob else 0
    return GaussianRational(re, im)


def rand_monomial(rng: random.Random, d: int, max_deg: int) -> tuple:
    deg = rng.randint(0, max_deg)
    mono = [0] * d
    for _ in range(deg):
        mono[rng.randrange(d)] += 1
    return tuple(mono)


def rand_poly(rng: random.Random, d: int, max_deg: int, max_terms: int = 4,
              exp_coeffs: bool = False, complex_prob: float = 0.0) -> Polynomial:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        c = GaussianRational(rand_nonzero(rng), rand_rational(rng) if rng.random() < complex_prob else 0)
        coeff = ExpCoeff.const(c)
        if exp_coeffs and rng.random() < 0.3:
            coeff = coeff + ExpCoeff.exp(rng.randint(-2, 2), rand_nonzero(rng))
        terms[rand_monomial(rng, d, max_deg)] = coeff
    return Polynomial(d, terms)


def rand_frequency(rng: random.Random, d: int, complex_prob: float = 0.3) -> Frequency:
    while True:
        f = Frequency.of([rand_gaussian(rng, complex_prob) for _ in range(d)])
        if not f.is_zero():
            return f


def rand_exppoly(rng: random.Random, d: int, max_modes: int = 3, max_deg: int = 4,
                 poly_prob: float = 0.5, max_terms: int = 4, **kw) -> ExpPolynomial:
    """Random canonical exponential polynomial; pure polynomial with probability ``poly_prob``."""
    modes = [(Frequency.zero(d), rand_poly(rng, d, max_deg, max_terms, **kw))]
    if rng.random() >= poly_prob:
        for _ in range(rng.randint(1, max_modes)):
            modes.append((rand_frequency(rng, d), rand_poly(rng, d, max_deg, max_terms, **kw)))
        if rng.random() < 0.5:
            modes = modes[1:]
    e = ExpPolynomial(d, modes)
    return e if e else rand_exppoly(rng, d, max_modes, max_deg, poly_prob, max_terms, **kw)


# --- sympy bridges --------------------------------------------------------------

T = sp.Symbol("t")


def gaussian_to_sympy(z: GaussianRational):
    return sp.Rational(int(z.re.numerator), int(z.re.denominator)) + sp.I * sp.Rational(
        int(z.im.numerator), int(z.im.denominator))


def expcoeff_to_sympy(c: ExpCoeff, symbol=T):
    """``E(n) -> t^n`` for integer exponents (independent transcendental stand-in)."""
    out = 0
    for z, v in c.items():
        if z.im or z.re.denominator != 1:
            raise ValueError("oracle supports integer real exponents only")
        out += gaussian_to_sympy(v) * symbol ** int(z.re)
    return out


def poly_to_sympy(p: Polynomial, syms) -> sp.Expr:
    out = 0
    for mono, c in p.items():
        term = expcoeff_to_sympy(c)
        for s, e in zip(syms, mono):
            term *= s ** e
        out += term
    return sp.expand(out)


def exppoly_to_sympy(e: ExpPolynomial, syms) -> sp.Expr:
    out = 0
    for f, p in e.items():
        lin = sum((gaussian_to_sympy(a) + 2 * sp.pi * sp.I * sp.Rational(int(t.numerator), int(t.denominator))) * s
                  for a, t, s in zip(f.lam, f.turns, syms))
        out += poly_to_sympy(p, syms) * sp.exp(lin)
    return out


def to_mpq(v) -> mpq:
    return mpq(int(sp.fraction(v)[0]), int(sp.fraction(v)[1]))
