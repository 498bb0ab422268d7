"""Hypothesis strategies over small exact values."""

from hypothesis import strategies as st

from polychar.exppoly import ExpPolynomial, Frequency, Polynomial
from polychar.scalar import ExpCoeff, GaussianRational, mpq

small_q = st.builds(lambda p, q: mpq(p, q), st.integers(-6, 6), st.integers(1, 4))
gaussians = st.builds(GaussianRational, small_q, small_q)
exponents = st.builds(GaussianRational, small_q, st.sampled_from([0, 0, mpq(1, 2), -1]))
exp_coeffs = st.lists(st.tuples(exponents, gaussians), max_size=3).map(
    lambda terms: sum((ExpCoeff.exp(z, c) for z, c in terms), ExpCoeff.const(0)))


def polynomials(d: int, max_deg: int = 3):
    monos = st.lists(st.integers(0, max_deg), min_size=d, max_size=d).map(tuple)
    return st.dictionaries(monos, gaussians.map(ExpCoeff.const), max_size=4).map(lambda t: Polynomial(d, t))


def frequencies(d: int):
    return st.lists(st.builds(GaussianRational, st.integers(-2, 2), st.sampled_from([0, 0, 1])),
                    min_size=d, max_size=d).map(Frequency.of)


def exppolys(d: int = 2):
    return st.lists(st.tuples(frequencies(d), polynomials(d, 2)), max_size=3).map(
        lambda modes: ExpPolynomial(d, modes))
