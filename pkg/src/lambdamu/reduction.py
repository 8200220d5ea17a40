"""One-step beta/mu reduction, strategies, traces and reachability search.

Positions are paths of child selectors from the root: ``0`` selects the
function of an application or the body of a binder / named term, ``1``
selects the argument of an application.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from lambdamu.tristate import Answer
from lambdamu.subst import rename_mu, subst_lambda, subst_structural
from lambdamu.syntax import (
    App,
    Lam,
    LVar,
    Mu,
    Named,
    Term,
    all_names,
    alpha_key,
    free_vars,
    fresh_name,
)

BETA = "beta"
MU = "mu"
STRATEGIES = ("leftmost", "head", "exhaustive", "positional")


class InvalidPosition(ValueError):
    pass


class PreconditionViolation(ValueError):
    pass


@dataclass(frozen=True)
class RedexPosition:
    path: tuple[int, ...]
    rule: str

    def __str__(self) -> str:
        return f"{self.rule}@{path_str(self.path)}"


def path_str(path) -> str:
    return ".".join(map(str, path)) if path else "root"


def parse_path(s: str) -> tuple[int, ...]:
    if s == "root":
        return ()
    return tuple(int(p) for p in s.split("."))


# ---------------------------------------------------------------------------
# redexes and positions


def redex_rule(t: Term) -> Optional[str]:
    if type(t) is App:
        ft = type(t.fun)
        if ft is Lam:
            return BETA
        if ft is Mu:
            return MU
    return None


def redexes(t: Term) -> list[RedexPosition]:
    """All redex positions, leftmost-outermost (pre-order) first."""
    out: list[RedexPosition] = []
    _collect(t, (), out)
    return out


def _collect(t, path, out):
    tt = type(t)
    if tt is LVar:
        return
    if tt is App:
        rule = redex_rule(t)
        if rule is not None:
            out.append(RedexPosition(path, rule))
        _collect(t.fun, path + (0,), out)
        _collect(t.arg, path + (1,), out)
    else:
        _collect(t.body, path + (0,), out)


def is_normal(t: Term) -> bool:
    stack = [t]
    while stack:
        s = stack.pop()
        ts = type(s)
        if ts is App:
            ft = type(s.fun)
            if ft is Lam or ft is Mu:
                return False
            stack.append(s.fun)
            stack.append(s.arg)
        elif ts is not LVar:
            stack.append(s.body)
    return True


def subterm_at(t: Term, path) -> Term:
    for sel in path:
        tt = type(t)
        if tt is App:
            t = t.arg if sel else t.fun
        elif tt is LVar or sel != 0:
            raise InvalidPosition(f"path {path_str(path)} leaves the term")
        else:
            t = t.body
    return t


def replace_at(t: Term, path, new: Term, _i: int = 0) -> Term:
    if _i == len(path):
        return new
    sel = path[_i]
    tt = type(t)
    if tt is App:
        if sel:
            return App(t.fun, replace_at(t.arg, path, new, _i + 1))
        return App(replace_at(t.fun, path, new, _i + 1), t.arg)
    if tt is LVar or sel != 0:
        raise InvalidPosition(f"path {path_str(path)} leaves the term")
    return tt(t.var if tt is not Named else t.mvar, replace_at(t.body, path, new, _i + 1))


def contract(r: Term) -> Term:
    """Contract a redex sitting at the root of ``r``."""
    f = r.fun
    if type(f) is Lam:
        return subst_lambda(f.body, f.var, r.arg)
    a, u = f.var, f.body
    if a in free_vars(r.arg)[1]:
        new = fresh_name(a, all_names(r.arg) | all_names(u))
        u = rename_mu(u, a, new)
        a = new
    return Mu(a, subst_structural(u, a, (r.arg,)))


def step_at(t: Term, p: RedexPosition) -> Term:
    sub = subterm_at(t, p.path)
    if redex_rule(sub) != p.rule:
        raise InvalidPosition(f"no {p.rule} redex at {path_str(p.path)} in {t}")
    return replace_at(t, p.path, contract(sub))


def reducts(t: Term) -> list[tuple[RedexPosition, Term]]:
    """Every one-step reduct, in leftmost order of the contracted redex."""
    return _reducts(t, []) or []


def _reducts(t, path):
    # one pass; None for redex-free subterms so they cost no allocation
    tt = type(t)
    if tt is App:
        fun, arg = t.fun, t.arg
        ft = type(fun)
        out = None
        if ft is Lam or ft is Mu:
            out = [(RedexPosition(tuple(path), BETA if ft is Lam else MU), contract(t))]
        if ft is not LVar:
            path.append(0)
            sub = _reducts(fun, path)
            path.pop()
            if sub:
                sub = [(p, App(f, arg)) for p, f in sub]
                out = sub if out is None else out + sub
        if type(arg) is not LVar:
            path.append(1)
            sub = _reducts(arg, path)
            path.pop()
            if sub:
                sub = [(p, App(fun, a)) for p, a in sub]
                out = sub if out is None else out + sub
        return out
    if tt is LVar:
        return None
    path.append(0)
    sub = _reducts(t.body, path)
    path.pop()
    if sub:
        name = t.mvar if tt is Named else t.var
        return [(p, tt(name, b)) for p, b in sub]
    return None


# ---------------------------------------------------------------------------
# strategies


def _leftmost(t, path):
    """(position, reduct) for the leftmost redex of ``t`` or None."""
    tt = type(t)
    if tt is LVar:
        return None
    if tt is App:
        ft = type(t.fun)
        if ft is Lam:
            return RedexPosition(path, BETA), contract(t)
        if ft is Mu:
            return RedexPosition(path, MU), contract(t)
        r = _leftmost(t.fun, path + (0,))
        if r is not None:
            return r[0], App(r[1], t.arg)
        r = _leftmost(t.arg, path + (1,))
        if r is not None:
            return r[0], App(t.fun, r[1])
        return None
    r = _leftmost(t.body, path + (0,))
    if r is None:
        return None
    if tt is Named:
        return r[0], Named(t.mvar, r[1])
    return r[0], tt(t.var, r[1])


def leftmost_step(t: Term) -> Optional[tuple[RedexPosition, Term]]:
    return _leftmost(t, ())


def step_leftmost(t: Term) -> Optional[Term]:
    r = _leftmost(t, ())
    return None if r is None else r[1]


@dataclass(frozen=True)
class HeadRedex:
    prefix: tuple[str, ...]
    redex: RedexPosition
    args: tuple


@dataclass(frozen=True)
class HNF:
    """Head normal form; for a mu head ``[a] u`` the arguments start with ``u``."""

    prefix: tuple[str, ...]
    head: str
    args: tuple


HeadForm = Union[HeadRedex, HNF]


def head_form(t: Term) -> HeadForm:
    prefix = []
    while type(t) in (Lam, Mu):
        prefix.append(t.var)
        t = t.body
    depth = len(prefix)
    args = []
    while type(t) is App:
        args.append(t.arg)
        t = t.fun
    args.reverse()
    if type(t) in (Lam, Mu):
        # t is applied to args[0]; the redex sits under len(args)-1 applications
        path = (0,) * depth + (0,) * (len(args) - 1)
        rule = BETA if type(t) is Lam else MU
        return HeadRedex(tuple(prefix), RedexPosition(path, rule), tuple(args[1:]))
    if type(t) is LVar:
        return HNF(tuple(prefix), t.name, tuple(args))
    return HNF(tuple(prefix), t.mvar, (t.body,) + tuple(args))


def step_head(t: Term) -> Optional[tuple[RedexPosition, Term]]:
    hf = head_form(t)
    if isinstance(hf, HNF):
        return None
    return hf.redex, step_at(t, hf.redex)


def head_iterated_step(t: Term) -> Optional[tuple[RedexPosition, Term]]:
    """Head reduction, then the arguments of the head variable left to right.

    This is the head-iteration reading of leftmost reduction; it must pick
    the same redex as ``leftmost_step``.
    """
    hf = head_form(t)
    if isinstance(hf, HeadRedex):
        return hf.redex, step_at(t, hf.redex)
    base = (0,) * len(hf.prefix)
    n = len(hf.args)
    if hf.head.startswith("'"):
        # ((['a] u) v1 ... vk): u at base + 0^k + 0, v_i at base + 0^(k-i) + 1
        k = n - 1
        slots = [base + (0,) * k + (0,)] + [base + (0,) * (k - i) + (1,) for i in range(1, n)]
    else:
        slots = [base + (0,) * (n - i) + (1,) for i in range(1, n + 1)]
    for arg, path in zip(hf.args, slots):
        r = head_iterated_step(arg)
        if r is not None:
            pos, new_arg = r
            return RedexPosition(path + pos.path, pos.rule), replace_at(t, path, new_arg)
    return None


# ---------------------------------------------------------------------------
# traces


@dataclass(frozen=True)
class Step:
    position: RedexPosition
    term: Term


@dataclass
class ReductionTrace:
    start: Term
    steps: list[Step] = field(default_factory=list)
    strategy: str = "leftmost"
    fuel_used: int = 0

    @property
    def final(self) -> Term:
        return self.steps[-1].term if self.steps else self.start

    def __len__(self) -> int:
        return len(self.steps)

    def terms(self) -> list[Term]:
        return [self.start] + [s.term for s in self.steps]

    def to_text(self) -> str:
        lines = [f"# strategy={self.strategy} fuel_used={self.fuel_used} steps={len(self.steps)}"]
        lines.append(f"start: {self.start}")
        for s in self.steps:
            lines.append(f"{s.position.rule} @{path_str(s.position.path)}: {s.term}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "start": str(self.start),
            "steps": [
                {"rule": s.position.rule, "path": list(s.position.path), "term": str(s.term)}
                for s in self.steps
            ],
            "strategy": self.strategy,
            "fuel_used": self.fuel_used,
        }

    @classmethod
    def from_json(cls, data) -> "ReductionTrace":
        from lambdamu.concrete import parse_term

        if isinstance(data, str):
            data = json.loads(data)
        steps = [
            Step(RedexPosition(tuple(s["path"]), s["rule"]), parse_term(s["term"])) for s in data["steps"]
        ]
        return cls(parse_term(data["start"]), steps, data["strategy"], data["fuel_used"])

    def replay(self) -> bool:
        """Re-run every recorded step; True iff each term is the recorded contraction."""
        from lambdamu.syntax import alpha_eq

        cur = self.start
        for s in self.steps:
            try:
                nxt = step_at(cur, s.position)
            except InvalidPosition:
                return False
            if not alpha_eq(nxt, s.term):
                return False
            cur = s.term
        return True


def trace_positions(start: Term, positions, strategy: str = "positional") -> ReductionTrace:
    """Build a trace by contracting the given positions in order."""
    trace = ReductionTrace(start, [], strategy, 0)
    cur = start
    for p in positions:
        cur = step_at(cur, p)
        trace.steps.append(Step(p, cur))
    trace.fuel_used = len(trace.steps)
    return trace


@dataclass
class NormalForm:
    trace: ReductionTrace

    @property
    def term(self) -> Term:
        return self.trace.final


@dataclass
class HeadNormalForm:
    """Head reduction stopped at a head normal form that still has redexes."""

    trace: ReductionTrace

    @property
    def term(self) -> Term:
        return self.trace.final


@dataclass
class FuelExhausted:
    trace: ReductionTrace

    @property
    def term(self) -> Term:
        return self.trace.final


NormalizeResult = Union[NormalForm, HeadNormalForm, FuelExhausted]


def normalize(t: Term, strategy: str = "leftmost", fuel: int = 1000) -> NormalizeResult:
    """Reduce ``t`` with the given strategy, contracting at most ``fuel`` redexes.

    ``exhaustive`` explores the whole reduction graph breadth-first and
    returns a shortest reduction to a normal form; there ``fuel`` bounds the
    number of explored terms.
    """
    if fuel < 1:
        raise ValueError("fuel must be positive")
    if strategy == "exhaustive":
        return _normalize_bfs(t, fuel)
    if strategy == "leftmost":
        stepper = leftmost_step
    elif strategy == "head":
        stepper = step_head
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    trace = ReductionTrace(t, [], strategy, 0)
    cur = t
    while True:
        r = stepper(cur)
        if r is None:
            if strategy == "head" and not is_normal(cur):
                return HeadNormalForm(trace)
            return NormalForm(trace)
        if trace.fuel_used >= fuel:
            return FuelExhausted(trace)
        pos, cur = r
        trace.steps.append(Step(pos, cur))
        trace.fuel_used += 1


def _normalize_bfs(t, fuel):
    start_key = alpha_key(t)
    parent = {start_key: None}
    terms = {start_key: t}
    queue = deque([start_key])
    explored = 0
    while queue:
        k = queue.popleft()
        cur = terms[k]
        if is_normal(cur):
            steps = []
            while parent[k] is not None:
                pk, pos = parent[k]
                steps.append(Step(pos, terms[k]))
                k = pk
            steps.reverse()
            return NormalForm(ReductionTrace(t, steps, "exhaustive", explored))
        if explored >= fuel:
            return FuelExhausted(ReductionTrace(t, [], "exhaustive", explored))
        explored += 1
        for pos, nxt in reducts(cur):
            nk = alpha_key(nxt)
            if nk not in parent:
                parent[nk] = (k, pos)
                terms[nk] = nxt
                queue.append(nk)
    raise AssertionError("reduction graph without a normal form must be infinite")


def leftmost_length(t: Term, fuel: int = 1000) -> Optional[int]:
    r = normalize(t, "leftmost", fuel)
    return len(r.trace) if isinstance(r, NormalForm) else None


# ---------------------------------------------------------------------------
# reachability


@dataclass
class ReductionGraph:
    """Terms reachable from ``root`` (keyed by alpha_key) explored breadth-first."""

    root: Term
    nodes: dict
    edges: dict
    complete: bool

    def normal_forms(self) -> list[Term]:
        return [t for k, t in self.nodes.items() if not self.edges.get(k)]


def reduction_graph(t: Term, state_bound: int = 10_000) -> ReductionGraph:
    root = alpha_key(t)
    nodes = {root: t}
    edges: dict = {}
    queue = deque([root])
    while queue:
        if len(edges) >= state_bound:
            return ReductionGraph(t, nodes, edges, False)
        k = queue.popleft()
        succ = []
        for _, nxt in reducts(nodes[k]):
            nk = alpha_key(nxt)
            succ.append(nk)
            if nk not in nodes:
                nodes[nk] = nxt
                queue.append(nk)
        edges[k] = succ
    return ReductionGraph(t, nodes, edges, True)


def longest_reduction(t: Term, state_bound: int = 10_000, memo: Optional[dict] = None) -> Optional[int]:
    """Length of the longest reduction sequence starting at ``t``.

    None when some sequence is infinite (the graph has a cycle) or when
    more than ``state_bound`` new terms would have to be visited. ``memo``
    (alpha_key -> length) may be shared across calls; only finished
    terms are ever stored in it.
    """
    memo = {} if memo is None else memo
    root = alpha_key(t)
    if root in memo:
        return memo[root]
    on_path = {root}
    stack = [[root, iter(reducts(t)), 0]]
    visited = 1
    while stack:
        frame = stack[-1]
        nxt = next(frame[1], None)
        if nxt is None:
            stack.pop()
            on_path.discard(frame[0])
            memo[frame[0]] = frame[2]
            if stack:
                stack[-1][2] = max(stack[-1][2], frame[2] + 1)
            continue
        k = alpha_key(nxt[1])
        hit = memo.get(k)
        if hit is not None:
            frame[2] = max(frame[2], hit + 1)
        elif k in on_path:
            return None
        else:
            visited += 1
            if visited > state_bound:
                return None
            on_path.add(k)
            stack.append([k, iter(reducts(nxt[1])), 0])
    return memo[root]


def iter_reducts_bfs(t: Term, limit: int) -> Iterator[Term]:
    """Distinct reducts of ``t`` (including ``t``) in breadth-first order.

    Stops after ``limit`` terms have been expanded. The caller can tell
    exhaustion from truncation via the generator's return value (True when
    the graph was exhausted).
    """
    seen = {alpha_key(t)}
    queue = deque([t])
    expanded = 0
    while queue:
        cur = queue.popleft()
        yield cur
        if expanded >= limit:
            return False
        expanded += 1
        for _, nxt in reducts(cur):
            k = alpha_key(nxt)
            if k not in seen:
                seen.add(k)
                queue.append(nxt)
    return True


def joinable(t1: Term, t2: Term, fuel: int = 200) -> Optional[Term]:
    """A common reduct of ``t1`` and ``t2`` found by alternating BFS, or None."""
    k1, k2 = alpha_key(t1), alpha_key(t2)
    if k1 == k2:
        return t1
    seen = [{k1: t1}, {k2: t2}]
    queues = [deque([t1]), deque([t2])]
    used = 0
    side = 0
    while used < fuel and (queues[0] or queues[1]):
        if not queues[side]:
            side ^= 1
        cur = queues[side].popleft()
        used += 1
        mine, other = seen[side], seen[side ^ 1]
        for _, nxt in reducts(cur):
            k = alpha_key(nxt)
            if k in mine:
                continue
            mine[k] = nxt
            if k in other:
                return nxt
            queues[side].append(nxt)
        side ^= 1
    return None


@dataclass(frozen=True)
class SearchResult:
    answer: Answer
    witness: Optional[Term] = None
    explored: int = 0


def search_candidates(t: Term, fuel: int = 200) -> Iterator[Term]:
    """Reducts of ``t`` (``t`` included) in the order ``search_reducts`` tries them.

    First the leftmost reduction sequence (up to ``fuel`` steps), then
    every reduct breadth-first (up to ``fuel`` expansions), skipping terms
    already offered. The generator returns True when the whole reduction
    graph was exhausted and False when fuel ran out.
    """
    cur = t
    tried = set()
    for _ in range(fuel + 1):
        yield cur
        tried.add(cur)
        r = leftmost_step(cur)
        if r is None:
            break
        cur = r[1]
    seen = {alpha_key(t)}
    queue = deque([t])
    explored = 0
    while queue:
        if explored >= fuel:
            return False
        s = queue.popleft()
        explored += 1
        if s not in tried:
            yield s
        for _, nxt in reducts(s):
            k = alpha_key(nxt)
            if k not in seen:
                seen.add(k)
                queue.append(nxt)
    return True


def search_reducts(t: Term, pred, fuel: int = 200) -> SearchResult:
    """Look for a reduct of ``t`` satisfying ``pred``, in ``search_candidates`` order.

    NO is only returned when the whole reduction graph has been exhausted.
    """
    gen = search_candidates(t, fuel)
    n = 0
    while True:
        try:
            s = next(gen)
        except StopIteration as stop:
            return SearchResult(Answer.NO if stop.value else Answer.UNKNOWN, None, n)
        n += 1
        if pred(s):
            return SearchResult(Answer.YES, s, n)


# ---------------------------------------------------------------------------
# y-redexes


def is_y_redex(t: Term, y: str) -> bool:
    return type(t) is App and type(t.fun) in (Lam, Mu) and type(t.arg) is LVar and t.arg.name == y


def guarded_y_redexes_only(t: Term, y: str) -> bool:
    """Every redex of ``t`` is a y-redex forming the body of a named term."""
    stack = [(t, False)]
    while stack:
        s, under_name = stack.pop()
        ts = type(s)
        if ts is LVar:
            continue
        if ts is App:
            if redex_rule(s) is not None and not (under_name and is_y_redex(s, y)):
                return False
            stack.append((s.fun, False))
            stack.append((s.arg, False))
        else:
            stack.append((s.body, ts is Named))
    return True


def yredex_audit(t_normal: Term, y: str, trace: ReductionTrace) -> bool:
    if not is_normal(t_normal):
        raise PreconditionViolation(f"{t_normal} is not normal")
    start = App(t_normal, LVar(y))
    if alpha_key(trace.start) != alpha_key(start):
        raise PreconditionViolation("trace does not start at (t y)")
    return all(guarded_y_redexes_only(s.term, y) for s in trace.steps)
