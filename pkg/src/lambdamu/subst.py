"""Capture-avoiding substitution: lambda, structural (mu) and simultaneous."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from lambdamu.syntax import (
    App,
    Lam,
    LVar,
    Mu,
    Named,
    Term,
    all_names,
    apply_seq,
    free_vars,
    fresh_name,
)


@dataclass(frozen=True)
class Substitution:
    """``[(x_i := u_i); (alpha_j :=* vs_j)]``.

    ``lmap`` sends lambda-identifiers to terms, ``mmap`` sends
    mu-identifiers to (possibly empty) tuples of terms. A substitution is
    metadata acting on terms; it never occurs inside one.
    """

    lmap: Mapping[str, Term] = field(default_factory=dict)
    mmap: Mapping[str, tuple] = field(default_factory=dict)

    def __post_init__(self):
        for a in self.mmap:
            if not a.startswith("'"):
                raise ValueError(f"structural substitution on non-mu name {a!r}")
        for x in self.lmap:
            if x.startswith("'"):
                raise ValueError(f"lambda substitution on mu name {x!r}")

    def is_empty(self) -> bool:
        return not self.lmap and not self.mmap

    def range_free_vars(self) -> tuple[frozenset[str], frozenset[str]]:
        lv: set[str] = set()
        mv: set[str] = set()
        for u in self.lmap.values():
            a, b = free_vars(u)
            lv |= a
            mv |= b
        for seq in self.mmap.values():
            for u in seq:
                a, b = free_vars(u)
                lv |= a
                mv |= b
        return frozenset(lv), frozenset(mv)


def subst_simultaneous(t: Term, s: Substitution) -> Term:
    if s.is_empty():
        return t
    rl, rm = s.range_free_vars()
    return _subst(t, dict(s.lmap), dict(s.mmap), rl, rm)


def _subst(t, lmap, mmap, rl, rm):
    tt = type(t)
    if tt is LVar:
        return lmap.get(t.name, t)
    if tt is App:
        return App(_subst(t.fun, lmap, mmap, rl, rm), _subst(t.arg, lmap, mmap, rl, rm))
    if tt is Lam:
        x, body = t.var, t.body
        if x in rl:
            new = fresh_name(x, rl | all_names(body) | lmap.keys())
            body = _subst(body, {x: LVar(new)}, {}, frozenset({new}), frozenset())
            x = new
        elif x in lmap:
            lmap = {k: v for k, v in lmap.items() if k != x}
        if not lmap and not mmap:
            return Lam(x, body)
        return Lam(x, _subst(body, lmap, mmap, rl, rm))
    if tt is Mu:
        a, body = t.var, t.body
        if a in rm:
            new = fresh_name(a, rm | all_names(body) | mmap.keys())
            body = rename_mu(body, a, new)
            a = new
        elif a in mmap:
            mmap = {k: v for k, v in mmap.items() if k != a}
        if not lmap and not mmap:
            return Mu(a, body)
        return Mu(a, _subst(body, lmap, mmap, rl, rm))
    # Named
    body = _subst(t.body, lmap, mmap, rl, rm)
    seq = mmap.get(t.mvar)
    if seq:
        body = apply_seq(body, seq)
    return Named(t.mvar, body)


def rename_mu(t: Term, old: str, new: str) -> Term:
    """Rename the free mu-variable ``old`` to ``new`` (``new`` assumed fresh)."""
    tt = type(t)
    if tt is LVar:
        return t
    if tt is App:
        return App(rename_mu(t.fun, old, new), rename_mu(t.arg, old, new))
    if tt is Lam:
        return Lam(t.var, rename_mu(t.body, old, new))
    if tt is Mu:
        if t.var == old:
            return t
        return Mu(t.var, rename_mu(t.body, old, new))
    return Named(new if t.mvar == old else t.mvar, rename_mu(t.body, old, new))


def subst_lambda(t: Term, x: str, v: Term) -> Term:
    """``t[x := v]``."""
    if x.startswith("'"):
        raise ValueError(f"lambda substitution on mu name {x!r}")
    rl, rm = free_vars(v)
    return _subst(t, {x: v}, {}, rl, rm)


def subst_structural(t: Term, a: str, vs) -> Term:
    """``t[a :=* vs]``: every ``[a] w`` becomes ``[a] (w vs)``, innermost first."""
    vs = tuple(vs)
    if not vs:
        return t
    return subst_simultaneous(t, Substitution({}, {a: vs}))
