"""Command line: one subcommand per checker, JSON report on stdout.

Exit codes: 0 verdict reported, 2 hypothesis failure, 3 parse or usage error,
4 soundness violation (equation and hypotheses hold, conclusion fails).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import geometry, numeric, probability, theorems
from .dsl import DSLError, parse_exppoly, parse_list, parse_matrix, parse_scalar, parse_vector, parse_vectors
from .errors import HypothesisError, SoundnessViolation
from .exppoly import render
from .linalg import SingularMatrixError
from .operators import UnivariatePoly
from .scalar import GaussianRational, NonExactError, format_rational

EXIT_OK = 0
EXIT_HYPOTHESIS = 2
EXIT_PARSE = 3
EXIT_SOUNDNESS = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isinf(v):
            return "-inf" if v < 0 else "inf"
        return v
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, GaussianRational):
        return str(value)
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return format_rational(value)
    return str(value)


def _report(subcommand: str, inputs: dict, hypothesis=None, verdict=None, details=None) -> dict:
    return {
        "subcommand": subcommand,
        "inputs": inputs,
        "hypothesis": hypothesis.to_dict() if hypothesis is not None else None,
        "verdict": verdict.to_dict() if verdict is not None else None,
        "details": details or {},
    }


def _fs(args, d: int):
    return [parse_exppoly(t, d) for t in parse_list(args.fs)]


def _mats(text: str, d: int):
    return [parse_matrix(t, d) for t in parse_list(text)]


# --- subcommands --------------------------------------------------------------------

def cmd_frechet(args):
    f = parse_exppoly(args.f, args.d)
    v = theorems.frechet_check(f, args.m)
    return _report("frechet", {"f": render(f), "m": args.m, "d": args.d}, None, v)


def cmd_levi_civita(args):
    f = parse_exppoly(args.f, args.d)
    lc = theorems.levi_civita_analyze(f)
    return _report("levi-civita", {"f": render(f), "d": args.d}, details=lc.to_dict())


def cmd_delcp1(args):
    fs = _fs(args, args.d)
    cs = _mats(args.cs, args.d)
    ys = parse_vectors(args.ys)
    out = theorems.delcp1_check(fs, cs, ys)
    return _report("delcp1", {"fs": [render(f) for f in fs], "cs": [str(c) for c in cs],
                              "ys": [[format_rational(v) for v in y] for y in ys]}, details=out)


def _hyp_inputs(fs, bs, cs, **extra):
    return {"fs": [render(f) for f in fs], "bs": [str(b) for b in bs], "cs": [str(c) for c in cs], **extra}


def cmd_got(args):
    fs = _fs(args, args.d)
    bs, cs = _mats(args.bs, args.d), _mats(args.cs, args.d)
    v = theorems.got_classify(fs, bs, cs, args.r, args.s)
    return _report("got", _hyp_inputs(fs, bs, cs, r=args.r, s=args.s), v.hypotheses, v)


def cmd_skitovich(args):
    fs = _fs(args, args.d)
    bs, cs = _mats(args.bs, args.d), _mats(args.cs, args.d)
    v = theorems.skitovich_symbolic_check(fs, bs, cs)
    return _report("skitovich", _hyp_inputs(fs, bs, cs), v.hypotheses, v)


def cmd_knw(args):
    f = parse_exppoly(args.f, 2)
    inputs = {"f": render(f), "N": args.N, "rhs_mode": args.rhs}
    if args.N in theorems.KNW_EXACT_N:
        residual = theorems.knw_residual(f, args.N, args.rhs)
        details = {"mode": "exact", "residual": render(residual), "vanishes": residual.is_zero()}
    else:
        value = numeric.knw_residual_numeric(f.evaluator(), args.N, args.rhs)
        details = {"mode": "numeric", "residual_max": value, "vanishes": value <= 1e-10}
    return _report("knw", inputs, details=details)


def cmd_sphere(args):
    f = parse_exppoly(args.f, args.d)
    q = UnivariatePoly([parse_scalar(t) for t in args.q.split(",")])
    ys = parse_vectors(args.ys)
    v = theorems.sphere_annihilator_check(f, q, ys)
    return _report("sphere", {"f": render(f), "q": str(q),
                              "ys": [[format_rational(c) for c in y] for y in ys]}, None, v)


def cmd_vandermonde(args):
    rhos = [parse_scalar(t) for t in args.rhos.split(",")]
    out = theorems.vandermonde_annihilation(rhos)
    return _report("vandermonde", {"rhos": [str(r) for r in rhos]}, details=out)


def cmd_geometry(args):
    inputs = {"d": args.d, "delta": args.delta}
    if args.x is not None:
        x = [float(v) for v in parse_vector(args.x)]
        p, q = geometry.sphere_difference_decompose(x, args.delta)
        inputs["x"] = x
        details = {"P": p.coords, "Q": q.coords,
                   "residual": float(np.linalg.norm(q.coords - p.coords - np.asarray(x)))}
        return _report("geometry", inputs, details=details)
    points = geometry.kronecker_generators(args.d, args.delta, args.t)
    coords = np.array([p.coords for p in points])
    fill = geometry.density_diagnostic(coords, args.box, args.eps, args.coeff_bound)
    inputs.update(t=args.t, eps=args.eps, box=args.box, coeff_bound=args.coeff_bound)
    return _report("geometry", inputs, details={"points": coords, "fill_ratio": fill})


def cmd_numeric_residual(args):
    f = parse_exppoly(args.f, args.d)
    grid = numeric.Grid.uniform(args.d, args.points, args.half_width)
    spec = numeric.frechet_spec(args.m, d=args.d)
    value = numeric.residual_max(spec, {"f": f.evaluator()}, grid, grid)
    return _report("numeric-residual", {"f": render(f), "m": args.m, "d": args.d,
                                        "points": args.points, "half_width": args.half_width},
                   details={"residual_max": value, "within_tolerance": value <= numeric.AGREEMENT_TOL})


def cmd_ghurye_olkin(args):
    out = probability.ghurye_olkin_run(args.family, args.n, args.seed, args.permutations)
    return _report("ghurye-olkin", {"family": args.family, "n": args.n, "seed": args.seed,
                                    "permutations": args.permutations}, details=out)


def cmd_counterexample_d1(args):
    inputs = {"delta": args.delta}
    fn = None
    if args.f is not None:
        f = parse_exppoly(args.f, 1)
        inputs["f"] = render(f)
        evaluate = f.evaluator()

        def real_part(pts):
            return np.real(evaluate(pts))
        fn = real_part
    out = numeric.d1_counterexample(args.delta, fn)
    return _report("counterexample-d1", inputs, details=out)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polychar", description="Exact checkers for polynomial functional equations.")
    parser.add_argument("--output", help="write the JSON report to this file as well")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("frechet", help="higher difference equation")
    p.add_argument("--f", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--d", type=int, default=1)
    p.set_defaults(func=cmd_frechet)

    p = sub.add_parser("levi-civita", help="separable rank of f(x+y)")
    p.add_argument("--f", required=True)
    p.add_argument("--d", type=int, default=1)
    p.set_defaults(func=cmd_levi_civita)

    p = sub.add_parser("delcp1", help="span of sum_i f_i(x + c_i y) over sample y")
    p.add_argument("--fs", required=True, help="expressions separated by '|'")
    p.add_argument("--cs", required=True, help="matrices separated by '|'")
    p.add_argument("--ys", required=True, help="vectors separated by ';'")
    p.add_argument("--d", type=int, default=1)
    p.set_defaults(func=cmd_delcp1)

    for name, func, help_text in (("got", cmd_got, "separated right-hand side"),
                                  ("skitovich", cmd_skitovich, "additive product equation")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--fs", required=True)
        p.add_argument("--bs", required=True)
        p.add_argument("--cs", required=True)
        p.add_argument("--d", type=int, default=1)
        if name == "got":
            p.add_argument("--r", type=int, required=True)
            p.add_argument("--s", type=int, required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("knw", help="mean over rotated shifts")
    p.add_argument("--f", required=True, help="expression in x1, x2")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--rhs", choices=("f_of_z", "zero"), default="f_of_z")
    p.set_defaults(func=cmd_knw)

    p = sub.add_parser("sphere", help="q(tau_y) f = 0 on sphere points")
    p.add_argument("--f", required=True)
    p.add_argument("--q", required=True, help="coefficients a0,a1,... of q")
    p.add_argument("--ys", required=True, help="vectors separated by ';'")
    p.add_argument("--d", type=int, default=2)
    p.set_defaults(func=cmd_sphere)

    p = sub.add_parser("vandermonde", help="kernel of a Vandermonde system")
    p.add_argument("--rhos", required=True)
    p.set_defaults(func=cmd_vandermonde)

    p = sub.add_parser("geometry", help="sphere decomposition or dense generators")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--x", help="decompose this vector instead of building generators")
    p.add_argument("--t", type=int, default=3)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--box", type=float, default=1.0)
    p.add_argument("--coeff-bound", type=int, default=50)
    p.set_defaults(func=cmd_geometry)

    p = sub.add_parser("numeric-residual", help="float grid residual of the difference equation")
    p.add_argument("--f", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--points", type=int, default=numeric.DEFAULT_POINTS)
    p.add_argument("--half-width", type=float, default=numeric.DEFAULT_HALF_WIDTH)
    p.set_defaults(func=cmd_numeric_residual)

    p = sub.add_parser("ghurye-olkin", help="Monte Carlo check of independent linear forms")
    p.add_argument("--family", choices=sorted(probability.GO_FAMILIES), required=True)
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--permutations", type=int, default=probability.PERMUTATIONS)
    p.set_defaults(func=cmd_ghurye_olkin)

    p = sub.add_parser("counterexample-d1", help="periodic solution on the line")
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--f", help="replace the default cosine by this expression in x1")
    p.set_defaults(func=cmd_counterexample_d1)
    return parser


def dumps(report: dict) -> str:
    return json.dumps(_jsonable(report), sort_keys=True, indent=2)


def run(argv: Sequence[str] | None = None) -> tuple[int, dict]:
    """Execute one subcommand; returns ``(exit_code, report)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return EXIT_PARSE, {"subcommand": None, "inputs": {}, "hypothesis": None, "verdict": None,
                            "details": {"error": str(exc)}}
    try:
        report = args.func(args)
        code = EXIT_OK
    except (DSLError, NonExactError) as exc:
        report, code = _report(args.subcommand, {}, details={"error": str(exc)}), EXIT_PARSE
    except HypothesisError as exc:
        report = _report(args.subcommand, {}, exc.report, details={"error": str(exc)})
        code = EXIT_HYPOTHESIS
    except SingularMatrixError as exc:
        report, code = _report(args.subcommand, {}, details={"error": str(exc)}), EXIT_HYPOTHESIS
    except SoundnessViolation as exc:
        report = _report(args.subcommand, {}, None, exc.verdict, {"error": str(exc)})
        code = EXIT_SOUNDNESS
    except ValueError as exc:
        report, code = _report(args.subcommand, {}, details={"error": str(exc)}), EXIT_PARSE
    report = _jsonable(report)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(dumps(report) + "\n")
    return code, report


def main(argv: Sequence[str] | None = None) -> int:
    code, report = run(argv)
    sys.stdout.write(dumps(report) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
