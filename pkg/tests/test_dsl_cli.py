import json
import random
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from helpers import rand_exppoly
from polychar import cli
from polychar import theorems
from polychar.dsl import DSLError, parse_biexppoly, parse_exppoly, parse_matrix, parse_scalar, parse_vectors
from polychar.exppoly import Classification, Frequency, render
from polychar.scalar import GaussianRational, mpq

SCHEMA = json.loads((Path(__file__).parent.parent / "docs" / "report.schema.json").read_text())


# --- DSL ----------------------------------------------------------------------------

def test_parse_examples():
    f = parse_exppoly("x1^2 + 3", 1)
    assert f.is_polynomial() and f.polynomial_part().degree == 2
    g = parse_exppoly("exp(2*x1) * x1", 1)
    assert g.frequencies() == [Frequency.of([2])]
    assert g.mode(Frequency.of([2])) == parse_exppoly("x1", 1).polynomial_part()


@pytest.mark.parametrize("text", ["exp(x1^2)", "exp(x1*x2)", "x1 +", "x3", "pi*x1", "x1^-1", "(x1", "x1 $ 2",
                                  "exp(exp(x1))", "E(x1)", "exp(pi*x1)"])
def test_parse_errors(text):
    with pytest.raises(DSLError):
        parse_exppoly(text, 2)


def test_error_reports_position():
    with pytest.raises(DSLError) as info:
        parse_exppoly("x1 + * 2", 1)
    assert info.value.pos == 5


def test_periodic_and_constant_exponentials():
    f = parse_exppoly("exp(2*pi*i*x1)", 1)
    (freq,) = f.frequencies()
    assert freq.turns == (1,) and freq.lam == (GaussianRational(0),)
    assert parse_exppoly("E(1/2*pi*i)", 1) == parse_exppoly("i", 1)


def test_scalars_vectors_matrices():
    assert parse_scalar("3/4 - 2i") == GaussianRational(mpq(3, 4), -2)
    assert parse_vectors("1,2;3/2,-1") == [[1, 2], [mpq(3, 2), -1]]
    assert parse_matrix("2", 3).det() == 8
    with pytest.raises(DSLError):
        parse_matrix("1,2;3", 2)


def test_biexppoly_names():
    F = parse_biexppoly("x1*y1 + exp(y2)", 2)
    assert F.d == 2 and render(F) == "x1*y1 + exp(y2)"


def _random_text(rng: random.Random, depth: int = 0) -> str:
    atoms = ["x1", "x2", "3", "1/2", "2i", "i", "7/3"]
    choice = rng.random()
    if depth > 2 or choice < 0.3:
        return rng.choice(atoms)
    if choice < 0.45:
        lin = " + ".join(f"{rng.choice(['1', '-2', '1/3', 'i', '2*pi*i'])}*{v}" for v in rng.sample(["x1", "x2"], rng.randint(1, 2)))
        return f"exp({lin})"
    if choice < 0.55:
        return f"({_random_text(rng, depth + 1)})^{rng.randint(0, 3)}"
    op = rng.choice([" + ", " - ", "*"])
    return f"({_random_text(rng, depth + 1)}){op}({_random_text(rng, depth + 1)})"


def test_round_trip_corpus():
    rng = random.Random(99)
    for k in range(200):
        if k % 2:
            f = rand_exppoly(rng, 2, complex_prob=0.3, exp_coeffs=True)
        else:
            f = parse_exppoly(_random_text(rng), 2)
        text = render(f)
        assert parse_exppoly(text, 2) == f
        assert render(parse_exppoly(text, 2)) == text


# --- CLI ---------------------------------------------------------------------------------

def _run(*argv):
    code, report = cli.run(list(argv))
    jsonschema.validate(report, SCHEMA)
    return code, report


def test_frechet_command():
    code, rep = _run("frechet", "--f", "x1^2", "--m", "3", "--d", "1")
    assert code == 0
    assert rep["verdict"]["equation_holds"] and rep["verdict"]["details"]["degree"] == 2


def test_vandermonde_command():
    code, rep = _run("vandermonde", "--rhos", "1,2,3")
    assert code == 0 and rep["details"]["kernel_dim"] == 0


@pytest.mark.parametrize("argv", [
    ["levi-civita", "--f", "x1^2"],
    ["delcp1", "--fs", "x1|x1^2", "--cs", "1|2", "--ys", "1;2;3;5;7"],
    ["got", "--fs", "x1^2|x1", "--bs", "1|1", "--cs", "1|2", "--r", "2", "--s", "2"],
    ["skitovich", "--fs", "x1^2|x1^2", "--bs", "1|1", "--cs", "1|-1"],
    ["knw", "--f", "x1^2 - x2^2", "--N", "4"],
    ["knw", "--f", "x1^2 - x2^2", "--N", "3"],
    ["sphere", "--f", "x1 + x2", "--q=-1,1", "--ys", "3,4;5,0;0,5"],
    ["geometry", "--x", "1,0"],
    ["geometry", "--coeff-bound", "10"],
    ["numeric-residual", "--f", "x1^2", "--m", "3"],
    ["counterexample-d1", "--delta", "0.5"],
    ["ghurye-olkin", "--family", "gaussian", "--n", "5000", "--seed", "1", "--permutations", "19"],
])
def test_every_subcommand_reports(argv):
    code, rep = _run(*argv)
    assert code == 0
    assert rep["subcommand"] == argv[0]


def test_exit_code_hypothesis_failure():
    code, rep = _run("got", "--fs", "x1|x1", "--bs", "1|1", "--cs", "2|2", "--r", "1", "--s", "1")
    assert code == 2 and rep["hypothesis"]["passed"] is False
    assert rep["hypothesis"]["offending"][0]["pair"] == [1, 2]


@pytest.mark.parametrize("argv", [
    ["frechet", "--f", "exp(x1^2)", "--m", "2"],
    ["frechet", "--f", "x1"],
    ["nonsense"],
    ["vandermonde", "--rhos", "1,a"],
])
def test_exit_code_parse_error(argv):
    code, rep = _run(*argv)
    assert code == 3 and "error" in rep["details"]


def test_exit_code_soundness_violation(monkeypatch):
    monkeypatch.setattr(theorems, "classify", lambda f: Classification(False, None))
    code, rep = _run("frechet", "--f", "x1^2", "--m", "3")
    assert code == 4
    assert rep["verdict"]["equation_holds"] and not rep["verdict"]["conclusion_holds"]


def test_uniform_run_is_flagged():
    code, rep = _run("ghurye-olkin", "--family", "uniform", "--n", "20000", "--seed", "7", "--permutations", "19")
    assert code == 0 and rep["details"]["failure_flagged"]


def test_reports_are_byte_identical(tmp_path):
    argv = ["ghurye-olkin", "--family", "laplace", "--n", "3000", "--seed", "5", "--permutations", "19"]
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        proc = subprocess.run([sys.executable, "-m", "polychar.cli", "--output", str(out), *argv],
                              capture_output=True, check=False)
        assert proc.returncode == 0
        outs.append((proc.stdout, out.read_bytes()))
    assert outs[0] == outs[1]
    assert outs[0][0] == outs[0][1]
