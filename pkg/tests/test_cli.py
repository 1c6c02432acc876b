"""Command-line verbs, exit codes and output formats."""

import json
import subprocess
import sys

import pytest

from contdef.cli import FAILURE, OK, USAGE, main
from contdef.formula import parse_formula


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_emit_jac3(capsys):
    code, out, _ = run(capsys, "emit", "jac", "3")
    assert code == OK
    formula, comment = out.strip().splitlines()
    assert "quantifiers=5" in comment
    parse_formula(formula)


def test_emit_int_times_round_trips(capsys):
    code, out, _ = run(capsys, "emit", "Int-times", "--format", "json")
    data = json.loads(out)
    assert code == OK and set(data["params"]) == {"h", "p", "tau*"}
    parse_formula(data["formula"], None)


def test_emit_chi_k_has_two_links(capsys):
    _, out, _ = run(capsys, "emit", "chi-geq-k", "2")
    assert out.count("(forall h") >= 2


def test_emit_pretty(capsys):
    _, out, _ = run(capsys, "emit", "sqsubseteq", "--pretty")
    assert out.startswith("∀x ∃y ∃z")


@pytest.mark.parametrize("argv", [
    ["emit", "nope"], ["emit", "jac"], ["emit", "jac", "0"], ["suite", "bogus"],
    ["suite", "empty", "--host", "padic-q:4"], ["classify-chunk", "0", "1", "2", "--tau", "5"],
    ["classify-chunk", "1", "--tau", "1", "--group", "weird"],
    ["lift", "/nonexistent/file"], ["germs", "--k", "0"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == USAGE and err.startswith("error:")


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == USAGE


def test_lift(tmp_path, capsys):
    src = tmp_path / "phi.txt"
    src.write_text("(= (* y y) y)\n(in-O y)\n")
    code, out, _ = run(capsys, "lift", str(src))
    lines = out.strip().splitlines()
    assert code == OK and len(lines) == 2
    assert "in-B" not in lines[0] and "in-B" in lines[1]


def test_lift_rejects_b_atoms(tmp_path, capsys):
    src = tmp_path / "phi.txt"
    src.write_text("(in-B y)\n")
    assert run(capsys, "lift", str(src))[0] == USAGE


def _model(tmp_path, f, g):
    path = tmp_path / "model.json"
    path.write_text(json.dumps({"host": "ordered-q", "points": ["a", "b", "c"],
                                "elements": {"f": f, "g": g}}))
    return path


def test_eval_holds_and_fails(tmp_path, capsys):
    phis = tmp_path / "phis.txt"
    phis.write_text("(forall x (exists y (exists z (= (* (+ 1 (* x g)) z) (+ 1 (* y f))))))\n")
    good = _model(tmp_path, [0, 1, 1], [0, 2, 0])
    code, out, _ = run(capsys, "eval", str(phis), "--model", str(good))
    assert code == OK and out.startswith("HOLDS")
    bad = _model(tmp_path, [0, 1, 0], [0, 2, 5])
    code, out, _ = run(capsys, "eval", str(phis), "--model", str(bad), "--format", "json")
    assert code == FAILURE and json.loads(out)["results"][0]["verdict"] == "fails"


def test_eval_bad_model(tmp_path, capsys):
    phis = tmp_path / "phis.txt"
    phis.write_text("(= f f)\n")
    bad = tmp_path / "m.json"
    bad.write_text("{not json")
    assert run(capsys, "eval", str(phis), "--model", str(bad))[0] == USAGE


def test_eval_unassigned_variable(tmp_path, capsys):
    phis = tmp_path / "phis.txt"
    phis.write_text("(= q 0)\n")
    assert run(capsys, "eval", str(phis), "--model", str(_model(tmp_path, [0] * 3, [0] * 3)))[0] \
        == USAGE


@pytest.mark.parametrize("argv,expected", [
    (["-2", "-1", "0", "1", "2", "--tau", "1"], "2"),
    (["-3", "-1", "0", "1", "3", "--tau", "1"], "NotAChunk (clause 2"),
    (["1/9", "1/3", "1", "3", "9", "--tau", "3", "--group", "multiplicative"], "2"),
])
def test_classify_chunk(capsys, argv, expected):
    code, out, _ = run(capsys, "classify-chunk", *argv)
    assert code == OK and out.startswith(expected)


@pytest.mark.parametrize("argv", [
    ["--kind", "open-affine", "--k", "3"],
    ["--kind", "valued-congruence", "--k", "4", "--host", "padic-q:5"],
])
def test_germs(capsys, argv):
    code, out, _ = run(capsys, "germs", *argv, "--depth", "8")
    assert code == OK
    assert out.splitlines()[:4] == ["S1: pass", "S2: pass", "S3: pass", "S4: pass"]


def test_suite_empty_and_out_file(tmp_path, capsys):
    dest = tmp_path / "r.json"
    code, out, _ = run(capsys, "suite", "empty", "--format", "json", "--out", str(dest))
    assert code == OK and out == ""
    assert json.loads(dest.read_text())["summary"]["ok"] is True


def test_suite_deterministic_bytes(capsys):
    _, a, _ = run(capsys, "suite", "z-interp", "--format", "json", "--seed", "9")
    _, b, _ = run(capsys, "suite", "z-interp", "--format", "json", "--seed", "9")
    assert a == b and json.loads(a)["seed"] == 9


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "contdef", "suite", "bogus"],
                       capture_output=True, text=True)
    assert r.returncode == USAGE
