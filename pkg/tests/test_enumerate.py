import pytest

from lambdamu.concrete import parse_term
from lambdamu.enumerate import (
    brute_force_terms,
    count_terms,
    terms_of_size,
    terms_upto,
    typed_terms_of_size,
    typed_terms_upto,
)
from lambdamu.syntax import alpha_eq, alpha_key, complexity, free_vars
from lambdamu.typecheck import is_instance, is_typable, principal_typing, typable_at

POOLS = (("x", "z"), ("'a",))


def test_size_zero_is_the_pool():
    assert list(terms_of_size(0, ("x",), ())) == [parse_term("x")]


def test_size_one_includes_every_shape():
    got = list(terms_of_size(1, ("x",), ("'a",)))
    for src in ("\\x. x", "mu 'a. x", "['a] x", "x x"):
        assert any(alpha_eq(t, parse_term(src)) for t in got)


def test_measured_counts():
    assert [count_terms(c, 2, 1) for c in range(6)] == [2, 11, 87, 855, 9647, 120228]


@pytest.mark.parametrize("c", range(5))
def test_generator_matches_count_and_has_no_alpha_duplicates(c):
    ts = list(terms_of_size(c, *POOLS))
    keys = {alpha_key(t) for t in ts}
    assert len(ts) == len(keys) == count_terms(c, 2, 1)
    assert all(complexity(t) == c for t in ts)
    assert all(free_vars(t)[0] <= {"x", "z"} and free_vars(t)[1] <= {"'a"} for t in ts)


@pytest.mark.parametrize("c", range(4))
def test_generator_matches_brute_force(c):
    assert {alpha_key(t) for t in terms_of_size(c, *POOLS)} == brute_force_terms(c, *POOLS)


def test_counts_for_other_pools():
    for nl, nm in ((1, 0), (0, 1), (3, 2)):
        lv = tuple(f"p{i}" for i in range(nl))
        mv = tuple(f"'q{i}" for i in range(nm))
        for c in range(4):
            assert sum(1 for _ in terms_of_size(c, lv, mv)) == count_terms(c, nl, nm)


def test_terms_upto_concatenates_sizes():
    assert len(list(terms_upto(3, *POOLS))) == sum(count_terms(c, 2, 1) for c in range(4))


@pytest.mark.parametrize("c", range(5))
def test_typed_generator_is_the_typable_fragment(c):
    typed = {alpha_key(t) for t in typed_terms_of_size(c, *POOLS)}
    expected = {alpha_key(t) for t in terms_of_size(c, *POOLS) if is_typable(t)}
    assert typed == expected


def test_typed_counts():
    assert [sum(1 for _ in typed_terms_of_size(c, *POOLS)) for c in range(6)] == [2, 9, 59, 453, 4051, 39039]


def test_reported_typing_is_principal():
    for t, g, d, a in typed_terms_upto(3, *POOLS, with_typing=True):
        assert typable_at(g, d, t, a)
        pg, pd, pa = principal_typing(t)
        assert is_instance(a, pa) and is_instance(pa, a)
