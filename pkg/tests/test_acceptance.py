"""Acceptance run: one check per criterion, each printing a single PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` or as a script.
"""

import time

import pytest

from lambdamu.concrete import parse_term, parse_type, print_type
from lambdamu.harness import OMEGA, default_config, run_suite
from lambdamu.reduction import NormalForm, longest_reduction, normalize
from lambdamu.realizability import is_mu_prefixed
from lambdamu.typecheck import check, infer, is_instance

E = "\\x. mu 'a. x"


def _suite(name, **expect):
    r = run_suite(name, default_config(name))
    ok = r.passed and r.exhaustions == 0
    for key, want in expect.items():
        ok = ok and getattr(r, key) == want
    detail = f"{r.instances} instances, {r.total_violations} violations, {r.exhaustions} exhaustions, {r.wall_time:.1f}s"
    return ok, detail, r


def crit_1():
    start = time.perf_counter()
    e = parse_term(E)
    checked = check({}, {}, e, parse_type("bot -> X"))
    ty, _ = infer({}, {}, e)
    principal = print_type(ty) == "bot -> ?T0" and is_instance(ty, parse_type("bot -> X"))
    took = time.perf_counter() - start
    return checked and principal and took < 1.0, f"check={checked}, infer={print_type(ty)}, {took * 1000:.1f}ms"


def crit_2():
    start = time.perf_counter()
    r = normalize(parse_term(f"({E}) x y1 y2"), "leftmost", 10)
    ok = isinstance(r, NormalForm) and len(r.trace) == 3
    ok = ok and r.term == parse_term("mu 'a. x") and is_mu_prefixed(r.term, "x")
    took = time.perf_counter() - start
    return ok and took < 1.0, f"{len(r.trace)} steps to {r.term}, {took * 1000:.1f}ms"


def crit_3():
    ok, detail, r = _suite("subject_reduction")
    return ok and r.wall_time < 120, detail


def crit_4():
    ok, detail, r = _suite("confluence")
    return ok and r.wall_time < 120, detail


def crit_5():
    ok, detail, _ = _suite("strong_normalization")
    control = longest_reduction(OMEGA, state_bound=10_000) is None
    return ok and control, f"{detail}; omega control exhausted={control}"


def crit_6():
    ok, detail, _ = _suite("ynorm")
    return ok, detail


def crit_7():
    ok, detail, _ = _suite("yredex")
    return ok, detail


def crit_8():
    ok, detail, _ = _suite("ytype2")
    return ok, detail


def crit_9():
    ok, detail, _ = _suite("sub1", instances=500)
    return ok, detail


def crit_10():
    ok, detail, _ = _suite("model_laws", instances=200)
    return ok, detail


def crit_11():
    ok, detail, r = _suite("fatiguant")
    return ok and r.wall_time < 300, f"{detail}; {'; '.join(r.notes)}"


def crit_12():
    ok, detail, _ = _suite("completeness", instances=200)
    return ok, detail


CRITERIA = [
    (1, "check and infer the lambda-mu term at bot -> X", crit_1),
    (2, "three leftmost steps to a mu-prefixed x", crit_2),
    (3, "subject reduction, size <= 7, under 2 min", crit_3),
    (4, "confluence, size <= 6, under 2 min", crit_4),
    (5, "strong normalization, size <= 7, omega control", crit_5),
    (6, "normalization of (t y) implies normalization of t, size <= 6", crit_6),
    (7, "reductions of (t y) contract guarded y-redexes only, size <= 6", crit_7),
    (8, "typing transported back along y-redexes, size <= 6", crit_8),
    (9, "substitution commutes with reduction, 500 seeded instances", crit_9),
    (10, "completeness model laws, 200 triples", crit_10),
    (11, "completeness membership vs direct membership grid, under 5 min", crit_11),
    (12, "general membership on reducts of typable terms, and refusals", crit_12),
]


def _line(n, label, ok, detail):
    return f"{'PASS' if ok else 'FAIL'}  criterion {n:>2}  {label}  [{detail}]"


@pytest.mark.parametrize("n, label, fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(n, label, fn, capsys):
    ok, detail = fn()[:2]
    with capsys.disabled():
        print("\n" + _line(n, label, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    import sys

    failed = 0
    for n, label, fn in CRITERIA:
        ok, detail = fn()[:2]
        failed += not ok
        print(_line(n, label, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
