"""Terms and types of the simply typed lambda-mu calculus.

Lambda-identifiers are plain strings (``x``, ``y_3``); mu-identifiers are
strings carrying a leading apostrophe (``'a``). The two alphabets are
therefore disjoint by construction.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Union


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True, slots=True)
class LVar:
    name: str

    def __str__(self) -> str:
        from lambdamu.concrete import print_term

        return print_term(self)


@dataclass(frozen=True, slots=True)
class Lam:
    var: str
    body: Term

    def __str__(self) -> str:
        from lambdamu.concrete import print_term

        return print_term(self)


@dataclass(frozen=True, slots=True)
class App:
    fun: Term
    arg: Term

    def __str__(self) -> str:
        from lambdamu.concrete import print_term

        return print_term(self)


@dataclass(frozen=True, slots=True)
class Mu:
    var: str
    body: Term

    def __str__(self) -> str:
        from lambdamu.concrete import print_term

        return print_term(self)


@dataclass(frozen=True, slots=True)
class Named:
    """The named term ``['a] body``."""

    mvar: str
    body: Term

    def __str__(self) -> str:
        from lambdamu.concrete import print_term

        return print_term(self)


Term = Union[LVar, Lam, App, Mu, Named]
TermSequence = tuple  # tuple[Term, ...]; the empty tuple is the empty sequence


def is_mu_name(name: str) -> bool:
    return name.startswith("'")


def apply_seq(t: Term, seq: Iterable[Term]) -> Term:
    """``(t v1 ... vn)``, folding application to the left; ``(t ()) = t``."""
    for v in seq:
        t = App(t, v)
    return t


def spine(t: Term) -> tuple[Term, tuple[Term, ...]]:
    """Split ``(h v1 ... vn)`` into ``h`` and ``(v1, ..., vn)``."""
    args = []
    while type(t) is App:
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, tuple(args)


def lams(names: Iterable[str], body: Term) -> Term:
    for n in reversed(list(names)):
        body = Lam(n, body)
    return body


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True, slots=True)
class Bot:
    def __str__(self) -> str:
        return "bot"


@dataclass(frozen=True, slots=True)
class Atom:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Arrow:
    dom: Type
    cod: Type

    def __str__(self) -> str:
        from lambdamu.concrete import print_type

        return print_type(self)


@dataclass(frozen=True, slots=True)
class Hole:
    """A unification variable; only produced by type inference."""

    id: int

    def __str__(self) -> str:
        return f"?T{self.id}"


Type = Union[Bot, Atom, Arrow, Hole]
BOT = Bot()


def arrows(*types: Type) -> Type:
    """``arrows(A1, ..., An, A)`` is ``A1 -> (... -> (An -> A))``."""
    if not types:
        raise ValueError("arrows() needs at least one type")
    result = types[-1]
    for a in reversed(types[:-1]):
        result = Arrow(a, result)
    return result


def type_atoms(a: Type) -> set[str]:
    if type(a) is Atom:
        return {a.name}
    if type(a) is Arrow:
        return type_atoms(a.dom) | type_atoms(a.cod)
    return set()


def type_holes(a: Type) -> list[int]:
    """Hole ids of ``a`` in left-to-right order of first occurrence."""
    out: list[int] = []

    def walk(b):
        if type(b) is Hole:
            if b.id not in out:
                out.append(b.id)
        elif type(b) is Arrow:
            walk(b.dom)
            walk(b.cod)

    walk(a)
    return out


# ---------------------------------------------------------------------------
# complexity


def complexity(t: Term) -> int:
    tt = type(t)
    if tt is LVar:
        return 0
    if tt is App:
        return complexity(t.fun) + complexity(t.arg) + 1
    return complexity(t.body) + 1


def complexity_type(a: Type) -> int:
    if type(a) is Arrow:
        return complexity_type(a.dom) + complexity_type(a.cod) + 1
    return 0


# ---------------------------------------------------------------------------
# variables


def free_vars(t: Term) -> tuple[frozenset[str], frozenset[str]]:
    """Free lambda-variables and free mu-variables of ``t``."""
    lv: set[str] = set()
    mv: set[str] = set()
    _fv(t, frozenset(), frozenset(), lv, mv)
    return frozenset(lv), frozenset(mv)


def _fv(t, lb, mb, lv, mv):
    while True:
        tt = type(t)
        if tt is LVar:
            if t.name not in lb:
                lv.add(t.name)
            return
        if tt is App:
            _fv(t.fun, lb, mb, lv, mv)
            t = t.arg
        elif tt is Lam:
            lb = lb | {t.var}
            t = t.body
        elif tt is Mu:
            mb = mb | {t.var}
            t = t.body
        else:
            if t.mvar not in mb:
                mv.add(t.mvar)
            t = t.body


def all_names(t: Term) -> set[str]:
    """Every identifier occurring in ``t``, bound or free, of either kind."""
    out: set[str] = set()
    stack = [t]
    while stack:
        s = stack.pop()
        ts = type(s)
        if ts is LVar:
            out.add(s.name)
        elif ts is App:
            stack.append(s.fun)
            stack.append(s.arg)
        elif ts is Named:
            out.add(s.mvar)
            stack.append(s.body)
        else:
            out.add(s.var)
            stack.append(s.body)
    return out


def is_closed(t: Term) -> bool:
    lv, mv = free_vars(t)
    return not lv and not mv


_SUFFIX = re.compile(r"_\d+$")


def fresh_name(base: str, avoid: Iterable[str] = ()) -> str:
    """``stem_k`` for the least ``k`` keeping it out of ``avoid``; deterministic."""
    stem = _SUFFIX.sub("", base)
    avoid = avoid if isinstance(avoid, (set, frozenset)) else set(avoid)
    for k in itertools.count():
        name = f"{stem}_{k}"
        if name not in avoid:
            return name


# ---------------------------------------------------------------------------
# alpha-equivalence


def alpha_key(t: Term):
    """A hashable nameless form: equal keys iff the terms are alpha-equivalent.

    Bound occurrences are replaced by the binding depth of their binder
    (counted separately for lambda and mu binders); free occurrences keep
    their names.
    """
    return _key(t, {}, {}, 0, 0)


def _key(t, lenv, menv, ld, md):
    tt = type(t)
    if tt is LVar:
        lvl = lenv.get(t.name)
        return t.name if lvl is None else lvl
    if tt is App:
        return ("@", _key(t.fun, lenv, menv, ld, md), _key(t.arg, lenv, menv, ld, md))
    if tt is Lam:
        env = dict(lenv)
        env[t.var] = ld
        return ("L", _key(t.body, env, menv, ld + 1, md))
    if tt is Mu:
        env = dict(menv)
        env[t.var] = md
        return ("M", _key(t.body, lenv, env, ld, md + 1))
    lvl = menv.get(t.mvar)
    return ("N", t.mvar if lvl is None else lvl, _key(t.body, lenv, menv, ld, md))


def alpha_eq(t1: Term, t2: Term) -> bool:
    if t1 == t2:
        return True
    return alpha_key(t1) == alpha_key(t2)


def canonical(t: Term, lprefix: str = "v", mprefix: str = "'m") -> Term:
    """Rename every binder to ``<prefix><depth>``.

    Alpha-equivalent terms have identical canonical forms provided the
    prefixes do not clash with the free names of ``t``.
    """
    return _canon(t, {}, {}, 0, 0, lprefix, mprefix)


def _canon(t, lenv, menv, ld, md, lp, mp):
    tt = type(t)
    if tt is LVar:
        return LVar(lenv.get(t.name, t.name))
    if tt is App:
        return App(_canon(t.fun, lenv, menv, ld, md, lp, mp), _canon(t.arg, lenv, menv, ld, md, lp, mp))
    if tt is Lam:
        name = f"{lp}{ld}"
        return Lam(name, _canon(t.body, {**lenv, t.var: name}, menv, ld + 1, md, lp, mp))
    if tt is Mu:
        name = f"{mp}{md}"
        return Mu(name, _canon(t.body, lenv, {**menv, t.var: name}, ld, md + 1, lp, mp))
    return Named(menv.get(t.mvar, t.mvar), _canon(t.body, lenv, menv, ld, md, lp, mp))


def term_order_key(t: Term):
    """Sort key used for minimal counterexamples: complexity, then print order."""
    return complexity(t), str(t)
