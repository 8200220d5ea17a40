"""Curry-style typing for the simply typed lambda-mu calculus.

Inference generates constraints on the fly and solves them by first-order
unification with occurs check. ``bot`` and atoms are rigid constants, and
so are holes that were not created by the running inference (holes in the
caller's contexts or goal type).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping, Optional

from lambdamu.reduction import (
    BETA,
    MU,
    ReductionTrace,
    SearchResult,
    reducts,
    search_reducts,
    step_at,
    subterm_at,
)
from lambdamu.subst import subst_structural
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
    alpha_eq,
    alpha_key,
    free_vars,
    type_holes,
)


class UnboundVariable(LookupError):
    pass


class ShapeMismatch(ValueError):
    pass


class TraceInvalid(ValueError):
    pass


# ---------------------------------------------------------------------------
# unification


class Unifier:
    """Solved-form substitution over holes; only holes in ``flex`` may be bound.

    Fresh holes get negative ids, so they can never be confused with the
    (non-negative) holes a caller passes in as fixed unknowns.
    """

    def __init__(self):
        self.binding: dict[int, Type] = {}
        self.flex: set[int] = set()
        self._next = -1

    def fresh(self) -> Hole:
        h = Hole(self._next)
        self._next -= 1
        self.flex.add(h.id)
        return h

    def walk(self, a: Type) -> Type:
        while type(a) is Hole and a.id in self.binding:
            a = self.binding[a.id]
        return a

    def resolve(self, a: Type) -> Type:
        a = self.walk(a)
        if type(a) is Arrow:
            return Arrow(self.resolve(a.dom), self.resolve(a.cod))
        return a

    def occurs(self, hid: int, a: Type) -> bool:
        stack = [a]
        while stack:
            b = self.walk(stack.pop())
            tb = type(b)
            if tb is Hole:
                if b.id == hid:
                    return True
            elif tb is Arrow:
                stack.append(b.dom)
                stack.append(b.cod)
        return False

    def unify(self, a: Type, b: Type) -> bool:
        stack = [(a, b)]
        binding, flex = self.binding, self.flex
        while stack:
            a, b = stack.pop()
            while type(a) is Hole and a.id in binding:
                a = binding[a.id]
            while type(b) is Hole and b.id in binding:
                b = binding[b.id]
            if a is b:
                continue
            ta, tb = type(a), type(b)
            if ta is Hole and a.id in flex:
                if tb is Hole and b.id == a.id:
                    continue
                if tb is Arrow and self.occurs(a.id, b):
                    return False
                binding[a.id] = b
            elif tb is Hole and b.id in flex:
                if ta is Arrow and self.occurs(b.id, a):
                    return False
                binding[b.id] = a
            elif ta is Arrow and tb is Arrow:
                stack.append((a.dom, b.dom))
                stack.append((a.cod, b.cod))
            elif a != b:
                return False
        return True


def is_instance(general: Type, specific: Type) -> bool:
    """True iff some assignment of the holes of ``general`` yields ``specific``."""
    sub: dict[int, Type] = {}

    def match(g, s):
        if type(g) is Hole:
            if g.id in sub:
                return sub[g.id] == s
            sub[g.id] = s
            return True
        if type(g) is Arrow:
            return type(s) is Arrow and match(g.dom, s.dom) and match(g.cod, s.cod)
        return g == s

    return match(general, specific)


# ---------------------------------------------------------------------------
# derivations


@dataclass(frozen=True)
class Sequent:
    gamma: Mapping[str, Type]
    delta: Mapping[str, Type]
    subject: Term
    goal: Type

    def __str__(self) -> str:
        g = ", ".join(f"{x}: {a}" for x, a in sorted(self.gamma.items()))
        d = ", ".join(f"{x}: {a}" for x, a in sorted(self.delta.items()))
        return f"{g} |- {self.subject} : {self.goal} ; {d}"


RULES = ("ax", "->i", "->e", "mu", "bot")


@dataclass(frozen=True)
class Derivation:
    rule: str
    conclusion: Sequent
    premises: tuple = ()

    @property
    def goal(self) -> Type:
        return self.conclusion.goal

    @property
    def subject(self) -> Term:
        return self.conclusion.subject

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def map_types(self, f) -> "Derivation":
        c = self.conclusion
        seq = Sequent(
            {x: f(a) for x, a in c.gamma.items()},
            {x: f(a) for x, a in c.delta.items()},
            c.subject,
            f(c.goal),
        )
        return Derivation(self.rule, seq, tuple(p.map_types(f) for p in self.premises))

    def to_json(self) -> dict:
        c = self.conclusion
        return {
            "rule": self.rule,
            "sequent": {
                "gamma": {x: str(a) for x, a in sorted(c.gamma.items())},
                "delta": {x: str(a) for x, a in sorted(c.delta.items())},
                "subject": str(c.subject),
                "goal": str(c.goal),
            },
            "children": [p.to_json() for p in self.premises],
        }

    @classmethod
    def from_json(cls, data) -> "Derivation":
        from lambdamu.concrete import parse_term, parse_type

        s = data["sequent"]
        seq = Sequent(
            {x: parse_type(a) for x, a in s["gamma"].items()},
            {x: parse_type(a) for x, a in s["delta"].items()},
            parse_term(s["subject"]),
            parse_type(s["goal"]),
        )
        return cls(data["rule"], seq, tuple(cls.from_json(c) for c in data["children"]))

    def pretty(self, indent: int = 0) -> str:
        lines = [f"{'  ' * indent}[{self.rule}] {self.conclusion}"]
        for p in self.premises:
            lines.append(p.pretty(indent + 1))
        return "\n".join(lines)


def verify_derivation(d: Derivation) -> bool:
    """Check every node against the five typing rules."""
    stack = [d]
    while stack:
        n = stack.pop()
        if not _node_ok(n):
            return False
        stack.extend(n.premises)
    return True


def _node_ok(n: Derivation) -> bool:
    c = n.conclusion
    t, ps = c.subject, n.premises
    if n.rule == "ax":
        return type(t) is LVar and not ps and c.gamma.get(t.name) == c.goal
    if n.rule == "->i":
        if type(t) is not Lam or type(c.goal) is not Arrow or len(ps) != 1:
            return False
        p = ps[0].conclusion
        return (
            p.subject == t.body
            and p.goal == c.goal.cod
            and dict(p.gamma) == {**c.gamma, t.var: c.goal.dom}
            and dict(p.delta) == dict(c.delta)
        )
    if n.rule == "->e":
        if type(t) is not App or len(ps) != 2:
            return False
        p, q = ps[0].conclusion, ps[1].conclusion
        return (
            p.subject == t.fun
            and q.subject == t.arg
            and p.goal == Arrow(q.goal, c.goal)
            and all(dict(x.gamma) == dict(c.gamma) and dict(x.delta) == dict(c.delta) for x in (p, q))
        )
    if n.rule == "mu":
        if type(t) is not Mu or len(ps) != 1:
            return False
        p = ps[0].conclusion
        return (
            p.subject == t.body
            and p.goal == BOT
            and dict(p.gamma) == dict(c.gamma)
            and dict(p.delta) == {**c.delta, t.var: c.goal}
        )
    if n.rule == "bot":
        if type(t) is not Named or len(ps) != 1 or c.goal != BOT:
            return False
        p = ps[0].conclusion
        return (
            p.subject == t.body
            and c.delta.get(t.mvar) == p.goal
            and dict(p.gamma) == dict(c.gamma)
            and dict(p.delta) == dict(c.delta)
        )
    return False


# ---------------------------------------------------------------------------
# inference


def _lookup(local, base, name):
    a = local.get(name)
    if a is None and base is not None:
        a = base.get(name)
    if a is None:
        raise UnboundVariable(name)
    return a


def _infer(t, lloc, lbase, mloc, mbase, u: Unifier):
    """Type of ``t`` under the unifier, or None when a constraint fails."""
    tt = type(t)
    if tt is LVar:
        return _lookup(lloc, lbase, t.name)
    if tt is App:
        f = _infer(t.fun, lloc, lbase, mloc, mbase, u)
        if f is None:
            return None
        a = _infer(t.arg, lloc, lbase, mloc, mbase, u)
        if a is None:
            return None
        f = u.walk(f)
        if type(f) is Arrow:
            return f.cod if u.unify(f.dom, a) else None
        r = u.fresh()
        return r if u.unify(f, Arrow(a, r)) else None
    if tt is Lam:
        h = u.fresh()
        body = _infer(t.body, {**lloc, t.var: h}, lbase, mloc, mbase, u)
        return None if body is None else Arrow(h, body)
    if tt is Mu:
        h = u.fresh()
        body = _infer(t.body, lloc, lbase, {**mloc, t.var: h}, mbase, u)
        if body is None or not u.unify(body, BOT):
            return None
        return h
    want = _lookup(mloc, mbase, t.mvar)
    body = _infer(t.body, lloc, lbase, mloc, mbase, u)
    if body is None or not u.unify(body, want):
        return None
    return BOT


def _derive(t, gamma, delta, u: Unifier):
    """Like ``_infer`` but also builds a derivation with unresolved types."""
    tt = type(t)
    if tt is LVar:
        a = _lookup(gamma, None, t.name)
        return a, Derivation("ax", Sequent(gamma, delta, t, a))
    if tt is App:
        f = _derive(t.fun, gamma, delta, u)
        if f is None:
            return None
        a = _derive(t.arg, gamma, delta, u)
        if a is None:
            return None
        r = u.fresh()
        if not u.unify(f[0], Arrow(a[0], r)):
            return None
        return r, Derivation("->e", Sequent(gamma, delta, t, r), (f[1], a[1]))
    if tt is Lam:
        h = u.fresh()
        body = _derive(t.body, {**gamma, t.var: h}, delta, u)
        if body is None:
            return None
        ty = Arrow(h, body[0])
        return ty, Derivation("->i", Sequent(gamma, delta, t, ty), (body[1],))
    if tt is Mu:
        h = u.fresh()
        body = _derive(t.body, gamma, {**delta, t.var: h}, u)
        if body is None or not u.unify(body[0], BOT):
            return None
        return h, Derivation("mu", Sequent(gamma, delta, t, h), (body[1],))
    want = _lookup(delta, None, t.mvar)
    body = _derive(t.body, gamma, delta, u)
    if body is None or not u.unify(body[0], want):
        return None
    return BOT, Derivation("bot", Sequent(gamma, delta, t, BOT), (body[1],))


def _check_free(gamma, delta, t):
    lv, mv = free_vars(t)
    for x in sorted(lv):
        if gamma.get(x) is None:
            raise UnboundVariable(x)
    for a in sorted(mv):
        if delta.get(a) is None:
            raise UnboundVariable(a)


def _renumber(ty: Type, rigid: set[int], u: Unifier):
    """Map flexible holes of ``ty`` to small ids (avoiding rigid ones), in print order."""
    ids = [h for h in type_holes(ty) if h in u.flex]
    mapping: dict[int, Hole] = {}
    nxt = 0
    for h in ids:
        while nxt in rigid:
            nxt += 1
        mapping[h] = Hole(nxt)
        nxt += 1

    def rename(a):
        a = u.resolve(a)
        if type(a) is Hole:
            if a.id in mapping:
                return mapping[a.id]
            if a.id in u.flex:
                # hole not reachable from the root type: give it an id too
                nonlocal nxt
                while nxt in rigid:
                    nxt += 1
                mapping[a.id] = Hole(nxt)
                nxt += 1
                return mapping[a.id]
            return a
        if type(a) is Arrow:
            return Arrow(rename(a.dom), rename(a.cod))
        return a

    return rename


def _context_holes(*ctxs) -> set[int]:
    out: set[int] = set()
    for c in ctxs:
        for a in c.values():
            out.update(type_holes(a))
    return out


def infer(gamma: Mapping[str, Type], delta: Mapping[str, Type], t: Term) -> Optional[tuple[Type, Derivation]]:
    """Principal type of ``t`` in the given contexts, with a derivation.

    Returns None when ``t`` is untypable. Holes of the result are
    renumbered from 0 in print order.
    """
    gamma, delta = dict(gamma), dict(delta)
    _check_free(gamma, delta, t)
    u = Unifier()
    r = _derive(t, gamma, delta, u)
    if r is None:
        return None
    rename = _renumber(u.resolve(r[0]), _context_holes(gamma, delta), u)
    return rename(r[0]), r[1].map_types(rename)


def principal_typing(t: Term) -> Optional[tuple[dict, dict, Type]]:
    """Most general (gamma, delta, type) for ``t`` with holes for its free variables."""
    lv, mv = free_vars(t)
    u = Unifier()
    gamma = {x: u.fresh() for x in sorted(lv)}
    delta = {a: u.fresh() for a in sorted(mv)}
    ty = _infer(t, gamma, None, delta, None, u)
    if ty is None:
        return None
    rename = _renumber(u.resolve(ty), set(), u)
    return (
        {x: rename(a) for x, a in gamma.items()},
        {x: rename(a) for x, a in delta.items()},
        rename(ty),
    )


def typable_at(gamma, delta, t: Term, goal: Type, solved: Optional[Mapping[int, Type]] = None) -> bool:
    """``gamma |- t : goal ; delta`` with every caller-supplied hole rigid.

    ``gamma`` and ``delta`` only need a ``get`` method; unbound variables
    raise ``UnboundVariable``. ``solved`` optionally gives caller holes a
    fixed meaning, so types need not be resolved beforehand.
    """
    u = Unifier()
    if solved:
        u.binding.update(solved)
    return _check(t, goal, {}, gamma, {}, delta, u)


def _check(t, goal, lloc, lbase, mloc, mbase, u: Unifier) -> bool:
    """Checking mode of ``_infer``: binders take their types from the goal when it is known."""
    tt = type(t)
    if tt is LVar:
        return u.unify(_lookup(lloc, lbase, t.name), goal)
    if tt is Lam:
        g = u.walk(goal)
        if type(g) is not Arrow:
            a = Arrow(u.fresh(), u.fresh())
            if not u.unify(g, a):
                return False
            g = a
        return _check(t.body, g.cod, {**lloc, t.var: g.dom}, lbase, mloc, mbase, u)
    if tt is Mu:
        return _check(t.body, BOT, lloc, lbase, {**mloc, t.var: goal}, mbase, u)
    if tt is Named:
        return u.unify(goal, BOT) and _check(t.body, _lookup(mloc, mbase, t.mvar), lloc, lbase, mloc, mbase, u)
    f = _infer(t.fun, lloc, lbase, mloc, mbase, u)
    if f is None:
        return False
    f = u.walk(f)
    if type(f) is Arrow:
        return u.unify(f.cod, goal) and _check(t.arg, f.dom, lloc, lbase, mloc, mbase, u)
    h = u.fresh()
    return u.unify(f, Arrow(h, goal)) and _check(t.arg, h, lloc, lbase, mloc, mbase, u)


def check(gamma: Mapping[str, Type], delta: Mapping[str, Type], t: Term, goal: Type) -> bool:
    _check_free(gamma, delta, t)
    return typable_at(gamma, delta, t, goal)


def is_typable(t: Term) -> bool:
    return principal_typing(t) is not None


# ---------------------------------------------------------------------------
# typing up to reduction


StarResult = SearchResult


def check_star(gamma, delta, t: Term, goal: Type, fuel: int = 200, restrict=None, typer=None) -> StarResult:
    """Is some reduct of ``t`` typable at ``goal``? Tri-state, with a witness.

    ``restrict``, when given, maps a candidate term to the contexts it is
    typed in (or None when it cannot be typed at all); this is how the
    completeness model consults only the declarations of free variables.
    ``typer(term, goal) -> bool`` replaces the typing test wholesale.
    """
    if restrict is None and typer is None:
        _check_free(gamma, delta, t)
    if typer is None:
        def pred(s):
            return _typable_or_false(gamma, delta, s, goal, restrict)
    else:
        def pred(s):
            return typer(s, goal)
    return search_reducts(t, pred, fuel)


def _typable_or_false(gamma, delta, t, goal, restrict):
    if restrict is not None:
        ctx = restrict(t)
        if ctx is None:
            return False
        gamma, delta = ctx
    try:
        return typable_at(gamma, delta, t, goal)
    except UnboundVariable:
        return False


# ---------------------------------------------------------------------------
# typing transport along y-redexes


def _rebuild(t: Term, d: Derivation, gamma: dict, delta: dict) -> Derivation:
    """Re-derive ``t`` in the given contexts, reading node types off ``d``.

    ``d`` must type a term of the same shape as ``t``; binder names and
    variable leaves may differ, which is exactly what happens under a
    variable-for-variable substitution.
    """
    tt = type(t)
    seq = Sequent(gamma, delta, t, d.goal)
    if tt is LVar:
        if d.rule != "ax" or gamma.get(t.name) != d.goal:
            raise ShapeMismatch(f"cannot type {t} at {d.goal}")
        return Derivation("ax", seq)
    if tt is Lam:
        if d.rule != "->i":
            raise ShapeMismatch(f"expected ->i for {t}, got {d.rule}")
        body = _rebuild(t.body, d.premises[0], {**gamma, t.var: d.goal.dom}, delta)
        return Derivation("->i", seq, (body,))
    if tt is App:
        if d.rule != "->e":
            raise ShapeMismatch(f"expected ->e for {t}, got {d.rule}")
        f = _rebuild(t.fun, d.premises[0], gamma, delta)
        a = _rebuild(t.arg, d.premises[1], gamma, delta)
        return Derivation("->e", seq, (f, a))
    if tt is Mu:
        if d.rule != "mu":
            raise ShapeMismatch(f"expected mu for {t}, got {d.rule}")
        body = _rebuild(t.body, d.premises[0], gamma, {**delta, t.var: d.goal}, )
        return Derivation("mu", seq, (body,))
    if d.rule != "bot":
        raise ShapeMismatch(f"expected bot for {t}, got {d.rule}")
    if delta.get(t.mvar) != d.premises[0].goal:
        raise ShapeMismatch(f"{t.mvar} is not declared at {d.premises[0].goal}")
    body = _rebuild(t.body, d.premises[0], gamma, delta)
    return Derivation("bot", seq, (body,))


def _ytype1(t, d, alpha, gamma, delta):
    tt = type(t)
    seq = Sequent(gamma, delta, t, d.goal)
    if tt is LVar:
        return _rebuild(t, d, gamma, delta)
    if tt is Lam:
        if d.rule != "->i":
            raise ShapeMismatch(f"expected ->i for {t}")
        body = _ytype1(t.body, d.premises[0], alpha, {**gamma, t.var: d.goal.dom}, delta)
        return Derivation("->i", seq, (body,))
    if tt is App:
        if d.rule != "->e":
            raise ShapeMismatch(f"expected ->e for {t}")
        f = _ytype1(t.fun, d.premises[0], alpha, gamma, delta)
        a = _ytype1(t.arg, d.premises[1], alpha, gamma, delta)
        return Derivation("->e", seq, (f, a))
    if tt is Mu:
        if t.var == alpha:
            # alpha is rebound: the substitution did not enter this subterm
            return _rebuild(t, d, gamma, delta)
        if d.rule != "mu":
            raise ShapeMismatch(f"expected mu for {t}")
        body = _ytype1(t.body, d.premises[0], alpha, gamma, {**delta, t.var: d.goal})
        return Derivation("mu", seq, (body,))
    if d.rule != "bot":
        raise ShapeMismatch(f"expected bot for {t}")
    if t.mvar != alpha:
        if delta.get(t.mvar) != d.premises[0].goal:
            raise ShapeMismatch(f"{t.mvar} is not declared at {d.premises[0].goal}")
        body = _ytype1(t.body, d.premises[0], alpha, gamma, delta)
        return Derivation("bot", seq, (body,))
    # [alpha] u became [alpha] (u' y): keep the typing of u' at B -> C
    app = d.premises[0]
    if app.rule != "->e":
        raise ShapeMismatch(f"expected ->e under [{alpha}]")
    fun = app.premises[0]
    if delta.get(alpha) != fun.goal:
        raise ShapeMismatch(f"{alpha} is not declared at {fun.goal}")
    body = _ytype1(t.body, fun, alpha, gamma, delta)
    return Derivation("bot", seq, (body,))


def transport_ytype1(d: Derivation, t: Term, alpha: str, y: str) -> Derivation:
    """From ``G, y:B |- t[alpha:=*y] : A ; alpha:C, D`` derive ``G, y:B |- t : A ; alpha:B->C, D``."""
    c = d.conclusion
    if not alpha_eq(subst_structural(t, alpha, (LVar(y),)), c.subject):
        raise ShapeMismatch(f"{c.subject} is not {t}[{alpha}:=*{y}]")
    b = c.gamma.get(y)
    cty = c.delta.get(alpha)
    if b is None or cty is None:
        raise ShapeMismatch(f"{y} or {alpha} missing from the contexts")
    delta = {**c.delta, alpha: Arrow(b, cty)}
    return _ytype1(t, d, alpha, dict(c.gamma), delta)


def _expand(t: Term, path, i: int, d: Derivation) -> Derivation:
    """Derivation for ``t`` from ``d``, which types ``t`` with the y-redex at ``path`` contracted."""
    c = d.conclusion
    seq = Sequent(c.gamma, c.delta, t, c.goal)
    if i < len(path):
        tt = type(t)
        if tt is App:
            if path[i]:
                return Derivation("->e", seq, (d.premises[0], _expand(t.arg, path, i + 1, d.premises[1])))
            return Derivation("->e", seq, (_expand(t.fun, path, i + 1, d.premises[0]), d.premises[1]))
        return Derivation(d.rule, seq, (_expand(t.body, path, i + 1, d.premises[0]),))
    f, y = t.fun, t.arg.name
    b = c.gamma.get(y)
    if b is None:
        raise ShapeMismatch(f"{y} is not declared")
    ax = Derivation("ax", Sequent(c.gamma, c.delta, t.arg, b))
    fty = Arrow(b, c.goal)
    if type(f) is Lam:
        body = _rebuild(f.body, d, {**c.gamma, f.var: b}, dict(c.delta))
        lam = Derivation("->i", Sequent(c.gamma, c.delta, f, fty), (body,))
        return Derivation("->e", seq, (lam, ax))
    if d.rule != "mu":
        raise ShapeMismatch("mu-contractum is not typed by the mu rule")
    inner = d.premises[0]
    body = _ytype1(f.body, inner, f.var, dict(c.gamma), {**c.delta, f.var: fty})
    mu = Derivation("mu", Sequent(c.gamma, c.delta, f, fty), (body,))
    return Derivation("->e", seq, (mu, ax))


def find_y_trace(t: Term, t_prime: Term, y: str, limit: int = 10_000) -> Optional[ReductionTrace]:
    """Shortest reduction from ``t`` to ``t_prime`` contracting y-redexes only."""
    from lambdamu.reduction import Step, is_y_redex

    goal = alpha_key(t_prime)
    start = alpha_key(t)
    parent = {start: None}
    terms = {start: t}
    queue = deque([start])
    while queue and len(parent) <= limit:
        k = queue.popleft()
        if k == goal:
            steps = []
            while parent[k] is not None:
                pk, pos = parent[k]
                steps.append(Step(pos, terms[k]))
                k = pk
            steps.reverse()
            return ReductionTrace(t, steps, "positional", len(steps))
        for pos, nxt in reducts(terms[k]):
            if not is_y_redex(subterm_at(terms[k], pos.path), y):
                continue
            nk = alpha_key(nxt)
            if nk not in parent:
                parent[nk] = (k, pos)
                terms[nk] = nxt
                queue.append(nk)
    return None


def transport_ytype2(t: Term, t_prime: Term, y: str, d: Derivation, trace: Optional[ReductionTrace] = None) -> Derivation:
    """Subject expansion along y-redex contractions from ``t`` to ``t_prime``."""
    from lambdamu.reduction import is_y_redex

    if trace is None:
        trace = find_y_trace(t, t_prime, y)
        if trace is None:
            raise TraceInvalid(f"{t_prime} is not reachable from {t} by y-redexes")
    if not alpha_eq(trace.start, t) or not alpha_eq(trace.final, t_prime):
        raise TraceInvalid("trace does not connect t to t'")
    if not alpha_eq(d.subject, t_prime):
        raise ShapeMismatch("derivation does not type t'")
    cur = trace.start
    terms = [cur]
    for s in trace.steps:
        sub = subterm_at(cur, s.position.path)
        if not is_y_redex(sub, y) or s.position.rule not in (BETA, MU):
            raise TraceInvalid(f"{sub} is not a {y}-redex")
        cur = step_at(cur, s.position)
        terms.append(cur)
    c = d.conclusion
    out = _rebuild(cur, d, dict(c.gamma), dict(c.delta))
    for s, prev in zip(reversed(trace.steps), reversed(terms[:-1])):
        out = _expand(prev, s.position.path, 0, out)
    return out
