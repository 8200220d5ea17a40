import contextlib
import io
import json
import subprocess
import sys

import pytest
from hypothesis import given, settings

from conftest import terms
from lambdamu.cli import main
from lambdamu.concrete import parse_term, print_term
from lambdamu.syntax import alpha_eq

E = "\\x. mu 'a. x"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_infer_golden(capsys):
    assert run(capsys, "infer", E) == (0, "bot -> ?T0\n", "")


def test_reduce_golden(capsys):
    code, out, _ = run(capsys, "reduce", "--strategy", "leftmost", "--fuel", "10", "(\\x. mu 'a. x) z w")
    assert code == 0
    assert out == "beta @0: (mu 'a. z) w\nmu @root: mu 'a. z\n"


def test_reduce_trace_golden(capsys):
    code, out, _ = run(capsys, "reduce", "--trace", "(\\x. mu 'a. x) z w")
    assert out.splitlines() == [
        "# strategy=leftmost fuel_used=2 steps=2",
        "start: (\\x. mu 'a. x) z w",
        "beta @0: (mu 'a. z) w",
        "mu @root: mu 'a. z",
    ]


def test_check_exit_codes(capsys):
    assert run(capsys, "check", "--type", "bot -> X", "\\x. x")[0] == 1
    assert run(capsys, "check", "--type", "bot -> X", E)[:2] == (0, "yes\n")


def test_parse_error_exit(capsys):
    code, _, err = run(capsys, "parse", "\\x.")
    assert code == 2 and "1:4" in err


def test_fuel_exhausted_exit(capsys):
    code, out, _ = run(capsys, "normalize", "--fuel", "20", "(\\x. x x) (\\x. x x)")
    assert code == 3 and "fuel exhausted" in out


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["suite", "nope"],
        ["check", "x"],
        ["reduce", "--fuel", "0", "x"],
        ["infer", "x y", "--gamma", "x: A"],
        ["infer", "x", "--gamma", "x A"],
    ],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 4


def test_infer_with_contexts_and_untypable(capsys):
    assert run(capsys, "infer", "--gamma", "x: A -> B, y: A", "x y") == (0, "B\n", "")
    assert run(capsys, "infer", "\\x. x x")[:2] == (1, "untypable\n")


def test_json_outputs(capsys):
    code, out, _ = run(capsys, "--json", "infer", E)
    d = json.loads(out)
    assert code == 0 and d["type"] == "bot -> ?T0" and d["derivation"]["rule"] == "->i"
    code, out, _ = run(capsys, "reduce", "--json", "(\\x. x) y")
    d = json.loads(out)
    assert d["outcome"] == "normal_form" and d["final"] == "y"
    assert d["trace"]["steps"] == [{"path": [], "rule": "beta", "term": "y"}]


def test_member_queries(capsys):
    code, out, _ = run(capsys, "member", "--type", "bot -> X1", "(\\z. z) (" + E + ")")
    assert code == 0 and out.startswith("yes")
    assert run(capsys, "member", "--type", "bot -> X1", "\\x. x")[0] == 1
    assert run(capsys, "member", "--model", "example", "--type", "bot -> X", E)[:2] == (0, "yes\n")
    assert run(capsys, "member", "--fuel", "10", "--type", "X1", "(\\x. x x x) (\\x. x x x)")[0] == 3


def test_member_reads_model_config(capsys, tmp_path):
    cfg = tmp_path / "model.json"
    cfg.write_text(json.dumps({"model": "completeness", "atoms": ["P"], "pools": {"lambda": "h", "mu": "'e"}}))
    code, out, _ = run(capsys, "member", "--config", str(cfg), "--type", "bot -> P", E)
    assert code == 0
    assert run(capsys, "member", "--config", str(tmp_path / "missing.json"), "--type", "X", "x")[0] == 4


def test_suite_command(capsys):
    code, out, _ = run(capsys, "suite", "confluence", "--size", "2")
    assert code == 0 and "PASS" in out
    code, out, _ = run(capsys, "suite", "sub1", "--size", "2", "--samples", "10", "--json")
    d = json.loads(out)
    assert d["passed"] and d["instances"] == 10 and "wall_time" not in d


def test_environment_overrides(capsys, monkeypatch):
    monkeypatch.setenv("LAMBDAMU_FUEL", "3")
    code, out, _ = run(capsys, "normalize", "(\\x. x x) (\\x. x x)")
    assert code == 3
    monkeypatch.setenv("LAMBDAMU_FUEL", "lots")
    assert run(capsys, "parse", "x")[0] == 4


def test_stdin_source(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO("x y z\n"))
    assert run(capsys, "parse", "-") == (0, "x y z\n", "")


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "lambdamu", "infer", E], capture_output=True, text=True)
    assert p.returncode == 0 and p.stdout == "bot -> ?T0\n"


@settings(max_examples=60)
@given(terms())
def test_parse_print_round_trip_through_cli(t):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(["--json", "parse", print_term(t)])
    assert code == 0
    assert alpha_eq(parse_term(json.loads(buf.getvalue())["term"]), t)
