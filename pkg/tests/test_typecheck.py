import pytest
from hypothesis import given, strategies as st

from conftest import terms
from lambdamu.concrete import parse_term, parse_type, print_type
from lambdamu.reduction import BETA, RedexPosition, Step, ReductionTrace, reducts
from lambdamu.syntax import BOT, Arrow, Atom, Hole, is_closed, type_holes
from lambdamu.tristate import Answer
from lambdamu.typecheck import (
    Derivation,
    ShapeMismatch,
    TraceInvalid,
    UnboundVariable,
    Unifier,
    check,
    check_star,
    infer,
    is_instance,
    is_typable,
    principal_typing,
    transport_ytype1,
    transport_ytype2,
    typable_at,
    verify_derivation,
)

E = "\\x. mu 'a. x"


def P(s):
    return parse_term(s)


def T(s):
    return parse_type(s)


def test_unifier_occurs_check():
    u = Unifier()
    h = u.fresh()
    assert not u.unify(h, Arrow(h, BOT))
    assert u.unify(h, Arrow(Atom("X"), BOT))
    assert u.resolve(h) == T("X -> bot")


def test_bottom_and_atoms_are_rigid():
    assert not Unifier().unify(BOT, Atom("X"))
    assert not Unifier().unify(Atom("X"), Atom("Y"))


def test_infer_examples():
    assert print_type(infer({}, {}, P("\\x. x"))[0]) == "?T0 -> ?T0"
    assert print_type(infer({}, {}, P(E))[0]) == "bot -> ?T0"
    peirce = infer({}, {}, P("\\x. mu 'a. ['a] (x \\y. mu 'b. ['a] y)"))[0]
    assert print_type(peirce) == "((?T0 -> ?T1) -> ?T0) -> ?T0"


def test_infer_untypable():
    assert infer({}, {}, P("\\x. x x")) is None
    assert not is_typable(P("(\\x. x x) (\\x. x x)"))


def test_infer_requires_declarations():
    with pytest.raises(UnboundVariable):
        infer({}, {}, P("x"))


def test_check_examples():
    assert check({"x": T("A")}, {}, P("x"), T("A"))
    assert check({}, {}, P(E), T("bot -> X"))
    assert not check({}, {}, P("\\x. x"), T("bot -> X"))


def test_caller_holes_are_rigid():
    # a hole in the caller's context is a fixed unknown, not a unification variable
    h = Hole(99)
    assert not check({"x": h}, {}, P("x"), T("X"))
    assert check({"x": h}, {}, P("x"), h)


def test_check_star_examples():
    r = check_star({}, {}, P("(\\z. z) " + "(" + E + ")"), T("bot -> X"))
    assert r.answer is Answer.YES
    assert check(dict(), dict(), r.witness, T("bot -> X"))
    r = check_star({}, {}, P(E), T("bot -> X"))
    assert r.answer is Answer.YES and r.witness == P(E)
    assert check_star({}, {}, P("\\x. x"), T("bot -> X"), fuel=1000).answer is Answer.NO


def test_check_star_untypable_redex_reaches_typable_reduct():
    t = P("(\\u. \\x. mu 'a. x) (\\w. w w)")
    assert not is_typable(t)
    r = check_star({}, {}, t, T("bot -> X"))
    assert r.answer is Answer.YES and r.witness == P(E)


def test_check_star_unknown_on_divergence():
    # omega's graph is a single node, so a search over it is exhausted and answers no
    assert check_star({}, {}, P("(\\x. x x) (\\x. x x)"), T("X"), fuel=20).answer is Answer.NO
    t = P("(\\x. x x x) (\\x. x x x)")
    assert check_star({}, {}, t, T("X"), fuel=20).answer is Answer.UNKNOWN


def test_principal_typing_of_open_term():
    g, d, a = principal_typing(P("['a] x"))
    assert a == BOT
    assert g["x"] == d["'a"]


def test_derivation_json_round_trip():
    ty, d = infer({}, {}, P("\\x. mu 'a. ['a] (x \\y. mu 'b. ['a] y)"))
    back = Derivation.from_json(d.to_json())
    assert back.to_json() == d.to_json()
    assert verify_derivation(back)
    assert "[mu]" in d.pretty()


def test_verify_rejects_tampered_derivation():
    _, d = infer({"y": T("X")}, {}, P("(\\x. x) y"))
    bad = d.map_types(lambda a: BOT if a == T("X -> X") else a)
    assert verify_derivation(d)
    assert not verify_derivation(bad)


def test_ytype1_examples():
    # t = ['a] x with 'a := * y: contexts y:B, x:B->C, 'a:C
    t = P("['a] x")
    g = {"x": T("B -> C"), "y": T("B")}
    _, d = infer(g, {"'a": T("C")}, P("['a] (x y)"))
    out = transport_ytype1(d, t, "'a", "y")
    assert verify_derivation(out)
    assert out.conclusion.delta["'a"] == T("B -> C")
    assert check(g, {"'a": T("B -> C")}, t, BOT)
    with pytest.raises(ShapeMismatch):
        transport_ytype1(d, P("['a] z"), "'a", "y")


def test_ytype1_variable_case_keeps_subject():
    _, d = infer({"x": T("A"), "y": T("B")}, {"'a": T("C")}, P("x"))
    out = transport_ytype1(d, P("x"), "'a", "y")
    assert out.subject == P("x") and out.conclusion.delta["'a"] == T("B -> C")


def test_ytype2_examples():
    g = {"y": T("X")}
    _, d = infer(g, {}, P("y"))
    out = transport_ytype2(P("(\\x. x) y"), P("y"), "y", d)
    assert [out.rule, out.premises[0].rule] == ["->e", "->i"]
    assert verify_derivation(out)

    g = {"x": T("X -> Y"), "y": T("X")}
    t, t2 = P("(mu 'a. ['a] x) y"), P("mu 'a. ['a] (x y)")
    _, d = infer(g, {}, t2)
    out = transport_ytype2(t, t2, "y", d)
    assert verify_derivation(out) and out.subject == t
    assert check(g, {}, t, out.goal)

    assert transport_ytype2(t2, t2, "y", d).to_json() == d.to_json()


def test_ytype2_rejects_non_y_redex():
    g = {"z": T("X")}
    _, d = infer(g, {}, P("z"))
    tr = ReductionTrace(P("(\\x. x) z"), [Step(RedexPosition((), BETA), P("z"))])
    with pytest.raises(TraceInvalid):
        transport_ytype2(P("(\\x. x) z"), P("z"), "y", d, tr)
    with pytest.raises(TraceInvalid):
        transport_ytype2(P("(\\x. x) z"), P("z"), "y", d)


ATOMS = st.sampled_from([BOT, Atom("X"), Atom("Y")])
ground_types = st.recursive(ATOMS, lambda sub: st.builds(Arrow, sub, sub), max_leaves=4)


@given(terms(10))
def test_inferred_derivations_verify(t):
    pt = principal_typing(t)
    if pt is None:
        return
    g, d, a = pt
    ty, der = infer(g, d, t)
    assert verify_derivation(der)
    assert der.subject == t
    assert is_instance(ty, a) and is_instance(a, ty)


@given(terms(8), ground_types)
def test_closed_check_matches_principal_instance(t, goal):
    if not is_closed(t):
        return
    r = infer({}, {}, t)
    expected = r is not None and is_instance(r[0], goal)
    assert check({}, {}, t, goal) == expected


@given(terms(10))
def test_subject_reduction_on_random_terms(t):
    pt = principal_typing(t)
    if pt is None:
        return
    g, d, a = pt
    for _, s in reducts(t):
        assert typable_at(g, d, s, a)


def test_principal_types_have_holes_only_where_free():
    ty, _ = infer({}, {}, P(E))
    assert type_holes(ty) and not type_holes(T("bot -> X"))


def test_fresh_holes_never_capture_caller_holes():
    # caller holes are numbered from 0, exactly like a brand-new unifier would number its own
    g = {"x": BOT, "z": Hole(1)}
    s = P("(mu 'm0. x) x (\\v0. z)")
    assert typable_at(g, {}, s, Hole(0))
    assert typable_at(g, {}, P("\\v. z"), Arrow(Hole(0), Hole(1)))
    assert not typable_at(g, {}, P("\\v. z"), Arrow(Hole(0), Hole(0)))
