import itertools

import pytest
from hypothesis import given

from conftest import terms
from lambdamu.concrete import parse_term
from lambdamu.reduction import (
    BETA,
    MU,
    FuelExhausted,
    HeadNormalForm,
    HeadRedex,
    HNF,
    InvalidPosition,
    NormalForm,
    PreconditionViolation,
    RedexPosition,
    ReductionTrace,
    Step,
    contract,
    head_form,
    head_iterated_step,
    is_normal,
    is_y_redex,
    joinable,
    leftmost_length,
    leftmost_step,
    longest_reduction,
    normalize,
    parse_path,
    path_str,
    reducts,
    redexes,
    search_candidates,
    step_at,
    subterm_at,
    trace_positions,
    yredex_audit,
)
from lambdamu.syntax import App, LVar, alpha_eq

E = "(\\x. mu 'a. x)"
OMEGA = "(\\x. x x) (\\x. x x)"


def P(s):
    return parse_term(s)


def test_redex_positions_in_leftmost_order():
    assert redexes(P("x")) == []
    assert redexes(P("(\\x. x) y")) == [RedexPosition((), BETA)]
    t = P("(mu 'a. (\\x. x) y) z")
    assert redexes(t) == [RedexPosition((), MU), RedexPosition((0, 0), BETA)]


def test_contraction_examples():
    assert contract(P("(\\x. x) y")) == P("y")
    assert contract(P("(mu 'a. ['a] x) v")) == P("mu 'a. ['a] (x v)")
    assert contract(P(E + " z")) == P("mu 'a. z")


def test_step_at_rejects_non_redex():
    with pytest.raises(InvalidPosition):
        step_at(P("x y"), RedexPosition((), BETA))


def test_leftmost_examples():
    assert leftmost_step(P("y")) is None
    assert leftmost_step(P(E + " x"))[1] == P("mu 'a. x")
    assert leftmost_step(P("((\\x. x) y) ((\\x. x) z)"))[1] == P("y ((\\x. x) z)")


def test_normalize_examples():
    r = normalize(P("\\x. x"), "leftmost", 10)
    assert isinstance(r, NormalForm) and len(r.trace) == 0
    assert isinstance(normalize(P(OMEGA), "leftmost", 50), FuelExhausted)
    r = normalize(P(E + " x y1 y2"), "leftmost", 10)
    assert isinstance(r, NormalForm)
    assert r.term == P("mu 'a. x")
    assert [s.position.rule for s in r.trace.steps] == [BETA, MU, MU]


def test_head_strategy_stops_at_head_normal_form():
    r = normalize(P("y ((\\x. x) z)"), "head", 10)
    assert isinstance(r, HeadNormalForm)
    assert r.term == P("y ((\\x. x) z)")


def test_exhaustive_finds_shortest_reduction():
    # leftmost duplicates the argument redex before contracting it
    t = P("(\\x. x x) ((\\y. y) z)")
    assert leftmost_length(t) == 3
    r = normalize(t, "exhaustive", 100)
    assert isinstance(r, NormalForm) and len(r.trace) == 2
    assert r.term == P("z z")
    assert r.trace.replay()


def test_leftmost_length_examples():
    assert leftmost_length(P("y")) == 0
    assert leftmost_length(P("(\\x. x) y")) == 1
    assert leftmost_length(P(E + " x y1 y2")) == 3
    assert leftmost_length(P(OMEGA), fuel=20) is None


def test_head_form_examples():
    hf = head_form(P("\\x. y x"))
    assert isinstance(hf, HNF) and hf.head == "y"
    hf = head_form(P("mu 'a. (\\x. x) z"))
    assert isinstance(hf, HeadRedex) and hf.redex.rule == BETA
    hf = head_form(P("\\x. mu 'a. ['a] (x w)"))
    assert isinstance(hf, HNF) and hf.head == "'a"


def test_joinable_examples():
    t = P("x")
    assert joinable(t, t) == t
    a, b = [s for _, s in reducts(P("((\\x. x) y) ((\\z. z) w)"))]
    assert alpha_eq(joinable(a, b), P("y w"))
    assert joinable(P("y"), P("z")) is None


def test_y_redex_examples():
    assert is_y_redex(P("(\\x. x) y"), "y")
    assert is_y_redex(P("(mu 'a. x) y"), "y")
    assert not is_y_redex(P("(\\x. x) z"), "y")


def test_yredex_audit_examples():
    for src in ("\\x. x", "mu 'a. ['a] \\z. z", "\\x. x x"):
        t = P(src)
        r = normalize(App(t, LVar("y")), "leftmost", 10)
        assert yredex_audit(t, "y", r.trace)
    one = trace_positions(P("(mu 'a. ['a] \\z. z) y"), [RedexPosition((), MU)])
    assert one.final == P("mu 'a. ['a] ((\\z. z) y)")
    assert yredex_audit(P("mu 'a. ['a] \\z. z"), "y", one)
    with pytest.raises(PreconditionViolation):
        yredex_audit(P("(\\x. x) z"), "y", one)


def test_yredex_audit_rejects_unguarded_redex():
    t = P("\\x. x")
    assert yredex_audit(t, "y", ReductionTrace(App(t, LVar("y")), []))
    # the audit inspects recorded terms; a step exposing a non-y redex must fail it
    forged = ReductionTrace(App(t, LVar("y")), [Step(RedexPosition((), BETA), P("(\\z. z) w"))])
    assert not yredex_audit(t, "y", forged)
    guarded = ReductionTrace(App(t, LVar("y")), [Step(RedexPosition((), BETA), P("mu 'a. ['a] ((\\z. z) y)"))])
    assert yredex_audit(t, "y", guarded)


def test_path_round_trip():
    for path in [(), (0,), (1, 0, 0, 1)]:
        assert parse_path(path_str(path)) == path


def test_trace_json_round_trip():
    r = normalize(P(E + " x y1 y2"), "leftmost", 10)
    back = ReductionTrace.from_json(r.trace.to_json())
    assert back == r.trace
    assert back.replay()


def test_longest_reduction():
    assert longest_reduction(P("x")) == 0
    assert longest_reduction(P("(\\x. x x) ((\\y. y) z)")) == 3
    assert longest_reduction(P(OMEGA)) is None


def test_search_candidates_starts_with_leftmost_sequence():
    t = P(E + " x y1 y2")
    seq = normalize(t, "leftmost", 10).trace.terms()
    got = list(itertools.islice(search_candidates(t, 10), len(seq)))
    assert got == seq


@given(terms())
def test_leftmost_is_first_redex_and_head_iteration(t):
    rs = redexes(t)
    ls = leftmost_step(t)
    hs = head_iterated_step(t)
    if not rs:
        assert ls is None and hs is None and is_normal(t)
        return
    assert ls[0] == rs[0]
    assert hs is not None and hs[0] == ls[0] and hs[1] == ls[1]


@given(terms())
def test_every_redex_position_is_a_redex(t):
    for p, s in reducts(t):
        r = subterm_at(t, p.path)
        assert isinstance(r, App)
        assert alpha_eq(s, step_at(t, p))


@given(terms())
def test_leftmost_trace_replays(t):
    r = normalize(t, "leftmost", 30)
    assert r.trace.replay()
    if isinstance(r, NormalForm):
        assert is_normal(r.term)
