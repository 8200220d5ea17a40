import pytest
from hypothesis import given

from conftest import terms
from lambdamu.concrete import ParseError, parse_term, parse_type, print_term, print_type
from lambdamu.syntax import BOT, App, Arrow, Atom, Lam, LVar, Mu, Named, alpha_eq


def test_parse_lambda_mu():
    assert parse_term("\\x. mu 'a. x") == Lam("x", Mu("'a", LVar("x")))
    assert parse_term("lam x. mu 'a. x") == parse_term("λx.μ'a.x")


def test_application_is_left_associative():
    assert parse_term("x y z") == App(App(LVar("x"), LVar("y")), LVar("z"))


def test_arrow_is_right_associative():
    assert parse_type("bot -> X -> X") == Arrow(BOT, Arrow(Atom("X"), Atom("X")))
    assert parse_type("_|_") == BOT == parse_type("⊥")


def test_binders_extend_right():
    assert parse_term("\\x. x y") == Lam("x", App(LVar("x"), LVar("y")))
    assert parse_term("f \\x. x") == App(LVar("f"), Lam("x", LVar("x")))
    assert parse_term("['a] x y") == Named("'a", App(LVar("x"), LVar("y")))


def test_multi_binder_sugar():
    assert parse_term("\\x y. x") == Lam("x", Lam("y", LVar("x")))


@pytest.mark.parametrize(
    "src, line, col, expected",
    [
        ("\\x.", 1, 4, "ident"),
        ("(x", 1, 3, ")"),
        ("mu a. x", 1, 4, "mident"),
        ("x\n  )", 2, 3, "eof"),
    ],
)
def test_parse_errors_carry_position(src, line, col, expected):
    with pytest.raises(ParseError) as info:
        parse_term(src)
    assert (info.value.line, info.value.col) == (line, col)
    assert expected in info.value.expected


def test_type_printing_parenthesizes_left_arrows():
    a = parse_type("(bot -> X) -> X")
    assert print_type(a) == "(bot -> X) -> X"
    assert parse_type(print_type(a)) == a


@given(terms())
def test_print_parse_round_trip(t):
    s = print_term(t)
    u = parse_term(s)
    assert u == t
    assert alpha_eq(u, t)
    assert print_term(u) == s
