"""Exhaustive term generation, plain and type-directed.

Generated terms name their binders canonically (``v<k>`` for the k-th
enclosing lambda, ``'m<k>`` for the k-th enclosing mu), so two generated
terms are alpha-equivalent exactly when they are equal.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterator

from lambdamu.syntax import (
    BOT,
    App,
    Arrow,
    Hole,
    Lam,
    LVar,
    Mu,
    Named,
    Term,
    Type,
    alpha_key,
)


def _lname(k: int) -> str:
    return f"v{k}"


def _mname(k: int) -> str:
    return f"'m{k}"


def terms_of_size(c: int, lvars: tuple, mvars: tuple) -> Iterator[Term]:
    """All terms of complexity exactly ``c`` with free variables among the pools."""
    gen = _Gen(tuple(lvars), tuple(mvars))
    return iter(gen.exact(c, 0, 0))


def terms_upto(c: int, lvars: tuple, mvars: tuple) -> Iterator[Term]:
    gen = _Gen(tuple(lvars), tuple(mvars))
    for k in range(c + 1):
        yield from gen.exact(k, 0, 0)


class _Gen:
    # lists for sizes below the top level are memoised per (size, depths)

    def __init__(self, lvars, mvars):
        self.lvars, self.mvars = lvars, mvars
        self.memo: dict = {}

    def exact(self, c, kl, km):
        key = (c, kl, km)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        out = list(self._gen(c, kl, km))
        self.memo[key] = out
        return out

    def _gen(self, c, kl, km):
        ls = [LVar(x) for x in self.lvars] + [LVar(_lname(k)) for k in range(kl)]
        ms = list(self.mvars) + [_mname(k) for k in range(km)]
        if c == 0:
            yield from ls
            return
        x = _lname(kl)
        for body in self.exact(c - 1, kl + 1, km):
            yield Lam(x, body)
        a = _mname(km)
        for body in self.exact(c - 1, kl, km + 1):
            yield Mu(a, body)
        sub = self.exact(c - 1, kl, km)
        for b in ms:
            for body in sub:
                yield Named(b, body)
        for i in range(c):
            args = self.exact(c - 1 - i, kl, km)
            for f in self.exact(i, kl, km):
                for v in args:
                    yield App(f, v)


@lru_cache(maxsize=None)
def count_terms(c: int, nl: int, nm: int) -> int:
    """Number of alpha-classes of complexity exactly ``c`` over pools of the given sizes."""
    if c == 0:
        return nl
    n = count_terms(c - 1, nl + 1, nm) + count_terms(c - 1, nl, nm + 1)
    n += nm * count_terms(c - 1, nl, nm)
    for i in range(c):
        n += count_terms(i, nl, nm) * count_terms(c - 1 - i, nl, nm)
    return n


def brute_force_terms(c: int, lvars: tuple, mvars: tuple) -> set:
    """Alpha-classes of complexity ``c``, found by naive expansion then dedup.

    Binders range over the pool names plus ``c`` spare names, which is
    enough to realise every class. Slow; only meant for tiny ``c``.
    """
    lnames = tuple(lvars) + tuple(f"b{i}" for i in range(c))
    mnames = tuple(mvars) + tuple(f"'b{i}" for i in range(c))

    @lru_cache(maxsize=None)
    def raw(k):
        if k == 0:
            return tuple(LVar(x) for x in lnames)
        out = []
        for body in raw(k - 1):
            out.extend(Lam(x, body) for x in lnames)
            out.extend(Mu(a, body) for a in mnames)
            out.extend(Named(a, body) for a in mnames)
        for i in range(k):
            for f in raw(i):
                out.extend(App(f, v) for v in raw(k - 1 - i))
        return tuple(out)

    from lambdamu.syntax import free_vars

    keys = set()
    lset, mset = set(lvars), set(mvars)
    for t in raw(c):
        lv, mv = free_vars(t)
        if lv <= lset and mv <= mset:
            keys.add(alpha_key(t))
    return keys


# ---------------------------------------------------------------------------
# type-directed generation


class _TrailUnifier:
    """Unifier with an undo trail, for backtracking generation."""

    def __init__(self):
        self.binding: dict[int, Type] = {}
        self.trail: list[int] = []
        self._ids = itertools.count()

    def fresh(self) -> Hole:
        return Hole(next(self._ids))

    def walk(self, a):
        b = self.binding
        while type(a) is Hole and a.id in b:
            a = b[a.id]
        return a

    def resolve(self, a):
        a = self.walk(a)
        if type(a) is Arrow:
            return Arrow(self.resolve(a.dom), self.resolve(a.cod))
        return a

    def _occurs(self, hid, a):
        a = self.walk(a)
        if type(a) is Hole:
            return a.id == hid
        if type(a) is Arrow:
            return self._occurs(hid, a.dom) or self._occurs(hid, a.cod)
        return False

    def unify(self, a, b) -> bool:
        binding = self.binding
        while type(a) is Hole and a.id in binding:
            a = binding[a.id]
        while type(b) is Hole and b.id in binding:
            b = binding[b.id]
        if a is b:
            return True
        ta, tb = type(a), type(b)
        if ta is Hole:
            if tb is Hole:
                if a.id == b.id:
                    return True
            elif tb is Arrow and self._occurs(a.id, b):
                return False
            binding[a.id] = b
            self.trail.append(a.id)
            return True
        if tb is Hole:
            if ta is Arrow and self._occurs(b.id, a):
                return False
            binding[b.id] = a
            self.trail.append(b.id)
            return True
        if ta is Arrow and tb is Arrow:
            return self.unify(a.dom, b.dom) and self.unify(a.cod, b.cod)
        return a == b

    def mark(self) -> int:
        return len(self.trail)

    def undo(self, m: int):
        trail, binding = self.trail, self.binding
        while len(trail) > m:
            del binding[trail.pop()]


class TypedTerms:
    """Every term of complexity ``c`` typable in some contexts for the pools.

    Iterating yields the terms; while a term is current, ``typing()``
    gives its principal typing ``(gamma, delta, type)`` over the pool
    variables (pool variables the term does not use keep hole types).
    """

    def __init__(self, c: int, lvars: tuple, mvars: tuple):
        self.c = c
        self._u = u = _TrailUnifier()
        self._free_l = tuple((x, u.fresh()) for x in lvars)
        self._free_m = tuple((a, u.fresh()) for a in mvars)
        self._goal = u.fresh()

    def raw_typing(self):
        """``(gamma, delta, type, solved)`` for the current term, unresolved.

        ``solved`` is a snapshot of the hole bindings; passing it to
        ``typable_at`` is equivalent to using ``typing()``.
        """
        return dict(self._free_l), dict(self._free_m), self._goal, dict(self._u.binding)

    def __iter__(self):
        return _typed_rel(self._u, self.c, self._goal, self._free_l, (), self._free_m, ())

    def typing(self):
        binding = self._u.binding

        def r(a):
            while type(a) is Hole and a.id in binding:
                a = binding[a.id]
            if type(a) is Arrow:
                return Arrow(r(a.dom), r(a.cod))
            return a

        return (
            {x: r(a) for x, a in self._free_l},
            {a: r(b) for a, b in self._free_m},
            r(self._goal),
        )


def typed_terms_of_size(c: int, lvars: tuple, mvars: tuple, with_typing: bool = False):
    tt = TypedTerms(c, lvars, mvars)
    for t in tt:
        yield (t, *tt.typing()) if with_typing else t


def _typed_rel(u, c, goal, FL, L, FM, M):
    # FL/FM are the free pools, L/M the enclosing binders with their types
    if c == 0:
        for x, ty in FL + L:
            m = len(u.trail)
            if u.unify(ty, goal):
                yield LVar(x)
            u.undo(m)
        return
    m = len(u.trail)
    a, b = u.fresh(), u.fresh()
    if u.unify(goal, Arrow(a, b)):
        x = _lname(len(L))
        for body in _typed_rel(u, c - 1, b, FL, L + ((x, a),), FM, M):
            yield Lam(x, body)
    u.undo(m)
    al = _mname(len(M))
    for body in _typed_rel(u, c - 1, BOT, FL, L, FM, M + ((al, goal),)):
        yield Mu(al, body)
    m = len(u.trail)
    if u.unify(goal, BOT):
        for name, ty in FM + M:
            for body in _typed_rel(u, c - 1, ty, FL, L, FM, M):
                yield Named(name, body)
    u.undo(m)
    for i in range(c):
        a = u.fresh()
        for f in _typed_rel(u, i, Arrow(a, goal), FL, L, FM, M):
            for v in _typed_rel(u, c - 1 - i, a, FL, L, FM, M):
                yield App(f, v)


def typed_terms_upto(c: int, lvars: tuple, mvars: tuple, with_typing: bool = False):
    for k in range(c + 1):
        yield from typed_terms_of_size(k, lvars, mvars, with_typing)
