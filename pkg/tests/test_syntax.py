from hypothesis import given

from conftest import terms
from lambdamu.concrete import parse_term, parse_type
from lambdamu.syntax import (
    App,
    LVar,
    alpha_eq,
    alpha_key,
    apply_seq,
    canonical,
    complexity,
    complexity_type,
    free_vars,
    fresh_name,
    is_closed,
    spine,
)


def P(s):
    return parse_term(s)


def test_term_complexity():
    assert complexity(P("x")) == 0
    assert complexity(P("\\x. x x")) == 2
    assert complexity(P("mu 'a. ['a] x")) == 2


def test_type_complexity():
    assert complexity_type(parse_type("bot")) == 0
    assert complexity_type(parse_type("X")) == 0
    assert complexity_type(parse_type("(bot -> X) -> X")) == 2


def test_free_vars_respect_kinds():
    assert free_vars(P("\\x. x y")) == ({"y"}, set())
    assert free_vars(P("mu 'a. ['b] x")) == ({"x"}, {"'b"})
    assert free_vars(P("\\x. mu 'a. ['a] x")) == (set(), set())
    # a lambda binder named like nothing in the mu alphabet leaves 'a free
    assert free_vars(P("\\a. ['a] a")) == (set(), {"'a"})


def test_alpha_eq_examples():
    assert alpha_eq(P("\\x. x"), P("\\y. y"))
    assert alpha_eq(P("mu 'a. ['a] x"), P("mu 'b. ['b] x"))
    assert not alpha_eq(P("\\x. x"), P("\\x. x x"))
    assert not alpha_eq(P("\\x. y"), P("\\y. y"))


def test_spine_inverts_apply_seq():
    t = apply_seq(LVar("f"), [LVar("a"), LVar("b")])
    assert t == App(App(LVar("f"), LVar("a")), LVar("b"))
    assert spine(t) == (LVar("f"), (LVar("a"), LVar("b")))


def test_fresh_name_avoids():
    n = fresh_name("x", {"x", "x_0"})
    assert n not in {"x", "x_0"}
    assert fresh_name("'a", {"'a"}).startswith("'")


@given(terms())
def test_canonical_is_alpha_equal(t):
    c = canonical(t)
    assert alpha_eq(t, c)
    assert alpha_key(t) == alpha_key(c)
    assert free_vars(t) == free_vars(c)
    assert canonical(c) == c


@given(terms(), terms())
def test_alpha_key_decides_alpha_eq(t, u):
    assert alpha_eq(t, u) == (canonical(t) == canonical(u))


@given(terms())
def test_closed_iff_no_free_vars(t):
    lv, mv = free_vars(t)
    assert is_closed(t) == (not lv and not mv)
