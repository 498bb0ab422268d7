"""Checkers for functional equations whose solutions are polynomials.

Every checker takes concrete exponential-polynomial data, tests the equation
exactly and reports whether the classical conclusion holds.  If the equation
holds, the matrix hypotheses pass and the conclusion still fails, the checker
raises :class:`SoundnessViolation`: that can only be an implementation bug.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Sequence

from .bivar import (
    BiExpPolynomial,
    check_c_hypotheses,
    compose_linear,
    embed_x,
    embed_y,
    separable_rank,
    separated_membership,
)
from .errors import HypothesisError, SoundnessViolation
from .exppoly import ExpPolynomial, classify, render
from .linalg import RationalMatrix, exp_rank, field_rank, nullspace
from .operators import UnivariatePoly, apply_q_of_translation, dilate, translate_span_dim
from .scalar import ExpCoeff, GaussianRational, format_rational, mpq, rational

INVERSE_DIFFERENCE = "inverse-difference"
CROSS_PRODUCT = "cross-product"


def _degree_text(deg) -> str | int:
    return "-inf" if deg == float("-inf") else deg


@dataclass(frozen=True)
class HypothesisReport:
    condition: str
    pairs: tuple
    passed: bool
    offending: tuple = ()

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "pairs_checked": [list(p) for p in self.pairs],
            "passed": self.passed,
            "offending": [{"pair": list(p), "det": str(det)} for p, det in self.offending],
        }


@dataclass
class Verdict:
    equation_holds: bool
    conclusion_holds: bool
    details: dict = field(default_factory=dict)
    hypotheses: HypothesisReport | None = None
    flags: list = field(default_factory=list)
    enforced: bool = True

    def enforce(self, checker: str) -> "Verdict":
        hyp_ok = self.hypotheses is None or self.hypotheses.passed
        if self.enforced and hyp_ok and self.equation_holds and not self.conclusion_holds:
            raise SoundnessViolation(f"{checker}: equation holds but the conclusion fails", self)
        return self

    def to_dict(self) -> dict:
        return {
            "equation_holds": self.equation_holds,
            "conclusion_holds": self.conclusion_holds,
            "enforced": self.enforced,
            "flags": list(self.flags),
            "details": self.details,
        }


def _matrices(ms, d: int) -> list[RationalMatrix]:
    out = []
    for m in ms:
        if isinstance(m, RationalMatrix):
            out.append(m)
        elif isinstance(m, (list, tuple)):
            out.append(RationalMatrix(m))
        else:
            out.append(RationalMatrix.scalar(d, m))
    return out


def check_hypotheses(bs: Sequence, cs: Sequence, form: str = INVERSE_DIFFERENCE,
                     d: int | None = None) -> HypothesisReport:
    """Pairwise invertibility of ``b_i^-1 c_i - b_j^-1 c_j`` or ``b_j c_i - b_i c_j``.

    Singular ``b_i`` or ``c_i`` are reported as the pair ``(i, i)``.
    """
    if len(bs) != len(cs):
        raise ValueError("bs and cs must have equal length")
    if form not in (INVERSE_DIFFERENCE, CROSS_PRODUCT):
        raise ValueError(f"unknown hypothesis form {form!r}")
    if d is None:
        d = next((m.shape[0] for m in list(bs) + list(cs) if isinstance(m, RationalMatrix)), 1)
    bs = _matrices(bs, d)
    cs = _matrices(cs, d)
    m = len(bs)
    pairs = []
    offending = []
    for i in range(m):
        pairs.append((i + 1, i + 1))
        for mat in (bs[i], cs[i]):
            if not mat.is_invertible():
                offending.append(((i + 1, i + 1), mat.det()))
                break
    singular_b = any(p == q for (p, q), _ in offending)
    for i in range(m):
        for j in range(i + 1, m):
            pairs.append((i + 1, j + 1))
            if form == INVERSE_DIFFERENCE:
                if singular_b:
                    continue
                diff = bs[i].inverse() @ cs[i] - bs[j].inverse() @ cs[j]
            else:
                diff = bs[j] @ cs[i] - bs[i] @ cs[j]
            det = diff.det()
            if not det:
                offending.append(((i + 1, j + 1), det))
    return HypothesisReport(form, tuple(pairs), not offending, tuple(offending))


def _require(report: HypothesisReport) -> None:
    if not report.passed:
        raise HypothesisError(f"hypothesis {report.condition} fails at {[p for p, _ in report.offending]}",
                              report)


# --- Frechet ------------------------------------------------------------------------

def frechet_lhs(f: ExpPolynomial, m: int) -> BiExpPolynomial:
    """``sum_{i=0}^m C(m,i) (-1)^(m-i) f(x + i y)`` as a function of ``(x, y)``."""
    d = f.nvars
    ident = RationalMatrix.identity(d)
    total = BiExpPolynomial.zero(d)
    for i in range(m + 1):
        c = RationalMatrix.scalar(d, i)
        term = compose_linear(f, ident, c, require_invertible=False)
        total = total + term * ((-1) ** (m - i) * comb(m, i))
    return total


def frechet_check(f: ExpPolynomial, m: int) -> Verdict:
    """``Delta_y^m f(x) = 0`` for all ``x, y`` iff ``f`` is a polynomial of degree ``<= m-1``."""
    if m < 1:
        raise ValueError("m must be positive")
    residual = frechet_lhs(f, m)
    cls = classify(f)
    holds = residual.is_zero()
    concl = cls.is_polynomial and cls.degree <= m - 1
    details = {
        "m": m,
        "is_polynomial": cls.is_polynomial,
        "degree": _degree_text(cls.degree) if cls.is_polynomial else None,
        "residual_modes": len(residual),
    }
    return Verdict(holds, concl, details).enforce("frechet_check")


# --- Levi-Civita ----------------------------------------------------------------------

@dataclass
class LeviCivita:
    n: int
    a_k: list
    v_k: list
    den: ExpCoeff

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "a_k": [render(a, _y_names(a.nvars)) for a in self.a_k],
            "v_k": [render(v) for v in self.v_k],
            "den": str(self.den),
        }


def _y_names(d: int) -> list[str]:
    return [f"y{k + 1}" for k in range(d)]


def levi_civita_analyze(f: ExpPolynomial) -> LeviCivita:
    """Shortest ``f(x + y) = sum_k a_k(y) v_k(x)``."""
    d = f.nvars
    ident = RationalMatrix.identity(d)
    dec = separable_rank(compose_linear(f, ident, ident))
    return LeviCivita(dec.rank, dec.us, dec.vs, dec.den)


def exp_translate_span_dim(f: ExpPolynomial) -> int:
    """Dimension of the span of all translates of an exponential polynomial."""
    return sum(translate_span_dim(p) for _, p in f.items())


# --- translates along several matrices ---------------------------------------------------

def delcp1_check(fs: Sequence[ExpPolynomial], cs: Sequence, sample_ys: Sequence[Sequence]) -> dict:
    """Dimension of ``span{sum_i f_i(x + c_i y) : y in sample_ys}`` with its growth profile."""
    if not fs:
        raise ValueError("need at least one function")
    d = fs[0].nvars
    cs = _matrices(cs, d)
    if len(cs) != len(fs):
        raise ValueError("fs and cs must have equal length")
    check_c_hypotheses(cs)
    samples = []
    for y in sample_ys:
        y = [rational(v) for v in y]
        g = ExpPolynomial.zero(d)
        for f, c in zip(fs, cs):
            g = g + f.translate(list(c @ y))
        samples.append(g)
    keys = sorted({(fr, mono) for g in samples for fr, p in g.items() for mono, _ in p.items()},
                  key=lambda k: (k[0].sort_key(), k[1]))
    rows = [[g.mode(fr).coefficient(mono) for fr, mono in keys] for g in samples]
    profile = [exp_rank(rows[: k + 1])[0] for k in range(len(rows))]
    bound = sum(exp_translate_span_dim(f) for f in fs)
    dim = profile[-1] if profile else 0
    return {
        "dim": dim,
        "profile": profile,
        "bound": bound,
        "within_bound": dim <= bound,
    }


# --- separated right-hand side ---------------------------------------------------------

def got_lhs(fs, bs, cs) -> BiExpPolynomial:
    d = fs[0].nvars
    total = BiExpPolynomial.zero(d)
    for f, b, c in zip(fs, _matrices(bs, d), _matrices(cs, d)):
        total = total + compose_linear(f, b, c)
    return total


def got_classify(fs: Sequence[ExpPolynomial], bs: Sequence, cs: Sequence, r: int, s: int) -> Verdict:
    """``sum f_i(b_i x + c_i y)`` lies in the separated class ``(r, s)`` only for polynomial ``f_i``."""
    if not fs:
        raise ValueError("need at least one function")
    d = fs[0].nvars
    report = check_hypotheses(bs, cs, INVERSE_DIFFERENCE, d)
    _require(report)
    lhs = got_lhs(fs, bs, cs)
    mem = separated_membership(lhs, r, s)
    classes = [classify(f) for f in fs]
    concl = all(c.is_polynomial for c in classes)
    details = {
        "r": r,
        "s": s,
        "member": mem.member,
        "reason": mem.reason,
        "degrees": [_degree_text(c.degree) if c.is_polynomial else None for c in classes],
    }
    if mem.member:
        names = _y_names(d)
        details["witness_a"] = {str(list(k)): render(v, names) for k, v in sorted(mem.a.items())}
        details["witness_b"] = {str(list(k)): render(v) for k, v in sorted(mem.b.items())}
    return Verdict(mem.member, concl, details, report).enforce("got_classify")


def skitovich_symbolic_check(fs: Sequence[ExpPolynomial], bs: Sequence, cs: Sequence) -> Verdict:
    """``sum f_i(b_i x + c_i y) = P(x) + Q(y)`` with ``P = sum f_i(b_i x)``, ``Q = sum f_i(c_i y)``.

    When it holds, P and Q must be polynomials of degree at most m, and at most
    m-1 if either vanishes.
    """
    if not fs:
        raise ValueError("need at least one function")
    d = fs[0].nvars
    m = len(fs)
    report = check_hypotheses(bs, cs, INVERSE_DIFFERENCE, d)
    _require(report)
    bms, cms = _matrices(bs, d), _matrices(cs, d)
    lhs = got_lhs(fs, bms, cms)
    p = ExpPolynomial.zero(d)
    q = ExpPolynomial.zero(d)
    for f, b, c in zip(fs, bms, cms):
        p = p + dilate(f, b)
        q = q + dilate(f, c)
    residual = lhs - embed_x(p) - embed_y(q)
    holds = residual.is_zero()
    bound = m - 1 if (p.is_zero() or q.is_zero()) else m
    cp, cq = classify(p), classify(q)
    concl = cp.is_polynomial and cq.is_polynomial and cp.degree <= bound and cq.degree <= bound
    details = {
        "P": render(p),
        "Q": render(q, _y_names(d)),
        "degree_P": _degree_text(cp.degree) if cp.is_polynomial else None,
        "degree_Q": _degree_text(cq.degree) if cq.is_polynomial else None,
        "degree_bound": bound,
        "residual_modes": len(residual),
    }
    return Verdict(holds, concl, details, report).enforce("skitovich_symbolic_check")


# --- mean value over rotations ------------------------------------------------------------

KNW_EXACT_N = (1, 2, 4)


def rotation_powers(n: int) -> list[RationalMatrix]:
    """Exact matrices of ``h -> w^k h`` for a primitive n-th root of unity ``w``."""
    if n not in KNW_EXACT_N:
        raise ValueError(f"exact rotations exist only for N in {KNW_EXACT_N}")
    rot = {1: RationalMatrix.identity(2), 2: RationalMatrix([[-1, 0], [0, -1]]),
           4: RationalMatrix([[0, -1], [1, 0]])}[n]
    out = [RationalMatrix.identity(2)]
    for _ in range(n - 1):
        out.append(rot @ out[-1])
    return out


def knw_residual(f: ExpPolynomial, n: int, rhs_mode: str = "f_of_z") -> BiExpPolynomial:
    """``(1/N) sum_k f(z + w^k h) - RHS`` in the variables ``(z, h)``."""
    if f.nvars != 2:
        raise ValueError("the rotation mean needs d = 2")
    if rhs_mode not in ("f_of_z", "zero"):
        raise ValueError(f"unknown rhs_mode {rhs_mode!r}")
    ident = RationalMatrix.identity(2)
    total = BiExpPolynomial.zero(2)
    for rot in rotation_powers(n):
        total = total + compose_linear(f, ident, rot)
    total = total * mpq(1, n)
    if rhs_mode == "f_of_z":
        total = total - embed_x(f)
    return total


# --- annihilators on a sphere ----------------------------------------------------------------

def sphere_annihilator_check(f: ExpPolynomial, q: UnivariatePoly, ys: Sequence[Sequence],
                             radius_sq=None, density: float | None = None) -> Verdict:
    """``q(tau_y) f = 0`` for every supplied ``y`` on one sphere.

    The polynomial conclusion is enforced only when it follows exactly: ``d > 1``,
    ``q != 0``, the ``ys`` span ``R^d`` and ``f`` has no periodic frequencies.  Then
    ``exp(<lambda, y>)`` would have to be an algebraic root of ``q`` for a nonzero
    algebraic exponent, which is impossible, so every frequency is orthogonal to
    a spanning set.  A numeric density estimate may be attached but never
    switches enforcement on.
    """
    d = f.nvars
    ys = [[rational(v) for v in y] for y in ys]
    if not ys:
        raise ValueError("need at least one sphere point")
    norms = [sum((v * v for v in y), mpq(0)) for y in ys]
    target = rational(radius_sq) if radius_sq is not None else norms[0]
    for y, nsq in zip(ys, norms):
        if len(y) != d:
            raise ValueError("sphere point has the wrong dimension")
        if nsq != target:
            raise ValueError(f"point {[format_rational(v) for v in y]} is not on the sphere of squared "
                             f"radius {format_rational(target)}")
    failing = []
    for idx, y in enumerate(ys):
        if not apply_q_of_translation(q, y, f).is_zero():
            failing.append(idx)
    holds = not failing
    cls = classify(f)
    flags = []
    if d == 1:
        flags.append("d1_exempt")
    spans = field_rank([[GaussianRational.coerce(v) for v in y] for y in ys]) == d
    periodic = any(fr.has_turns() for fr in f.frequencies())
    enforced = d > 1 and not q.is_zero() and spans and not periodic
    if d > 1 and not enforced:
        flags.append("not_enforced")
    details = {
        "radius_sq": format_rational(target),
        "points": len(ys),
        "failing_points": failing,
        "ys_span": spans,
        "periodic_frequencies": periodic,
        "is_polynomial": cls.is_polynomial,
        "degree": _degree_text(cls.degree) if cls.is_polynomial else None,
    }
    if density is not None:
        details["density_fill_ratio"] = density
    verdict = Verdict(holds, cls.is_polynomial, details, None, flags, enforced)
    return verdict.enforce("sphere_annihilator_check")


# --- Vandermonde ---------------------------------------------------------------------------

def vandermonde_annihilation(rhos: Sequence) -> dict:
    """Kernel of ``a -> (sum_j a_j rho_i^j)_i`` for ``n + 1`` nodes."""
    rhos = [GaussianRational.coerce(r) for r in rhos]
    size = len(rhos)
    if size == 0:
        raise ValueError("need at least one node")
    rows = [[r ** j for j in range(size)] for r in rhos]
    basis = nullspace(rows)
    return {
        "kernel_dim": len(basis),
        "rank": size - len(basis),
        "distinct": len(set(rhos)),
        "basis": basis,
    }
