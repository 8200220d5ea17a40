"""Property suites run over exhaustively enumerated (or seeded random) instances.

Each suite is an instance stream plus a per-instance check. A check
returns None on success or a dict describing the violation; the dict
always carries the printed instance so it can be replayed with
``replay``.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

from lambdamu.concrete import parse_term, parse_type
from lambdamu.enumerate import TypedTerms, terms_upto
from lambdamu.realizability import (
    build_completeness_model,
    build_example_model,
    example_sampler,
    general_membership,
    interp_type,
    is_mu_prefixed,
    membership,
    membership_completeness,
    membership_direct,
    model_law_check,
    model_law_violations,
    w_index,
)
from lambdamu.reduction import (
    NormalForm,
    RedexPosition,
    Step,
    ReductionTrace,
    is_normal,
    joinable,
    leftmost_length,
    longest_reduction,
    normalize,
    reducts,
    replace_at,
    redexes,
    search_reducts,
    step_at,
    yredex_audit,
    is_y_redex,
    subterm_at,
)
from lambdamu.subst import Substitution, rename_mu, subst_lambda, subst_simultaneous, subst_structural
from lambdamu.syntax import (
    BOT,
    App,
    Arrow,
    Atom,
    Hole,
    Lam,
    LVar,
    Mu,
    Term,
    Type,
    alpha_key,
    apply_seq,
    complexity,
    free_vars,
    fresh_name,
    is_closed,
    term_order_key,
    type_holes,
    all_names,
)
from lambdamu.tristate import Answer
from lambdamu.typecheck import (
    check,
    infer,
    principal_typing,
    transport_ytype2,
    typable_at,
    verify_derivation,
)


@dataclass(frozen=True)
class EnumConfig:
    """Bounds for one suite run. Enumeration under a config is finite and deterministic."""

    max_term_size: int = 4
    free_lvars: tuple = ("x", "z")
    free_mvars: tuple = ("'a",)
    max_type_complexity: int = 2
    atom_alphabet: tuple = ("X1", "X2")
    fuel: int = 200
    seed: int = 0
    state_bound: int = 10_000
    samples: int = 100
    max_reported: int = 10

    def __post_init__(self):
        if self.max_term_size < 0:
            raise ValueError("max_term_size must be non-negative")
        for name in ("max_type_complexity", "fuel", "state_bound", "samples", "max_reported"):
            if getattr(self, name) < 0 or (name != "max_type_complexity" and getattr(self, name) == 0):
                raise ValueError(f"{name} must be positive")
        if any(x.startswith("'") for x in self.free_lvars):
            raise ValueError("lambda pool names must not start with an apostrophe")
        if any(not a.startswith("'") for a in self.free_mvars):
            raise ValueError("mu pool names must start with an apostrophe")

    def to_json(self) -> dict:
        d = asdict(self)
        for k in ("free_lvars", "free_mvars", "atom_alphabet"):
            d[k] = list(d[k])
        return d

    @classmethod
    def from_json(cls, d: dict) -> "EnumConfig":
        d = dict(d)
        for k in ("free_lvars", "free_mvars", "atom_alphabet"):
            if k in d:
                d[k] = tuple(d[k])
        return cls(**d)


@dataclass
class SuiteReport:
    name: str
    config: EnumConfig
    instances: int = 0
    violations: list = field(default_factory=list)
    total_violations: int = 0
    exhaustions: int = 0
    notes: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return self.total_violations == 0

    def to_json(self, timing: bool = True) -> dict:
        d = {
            "suite": self.name,
            "passed": self.passed,
            "instances": self.instances,
            "total_violations": self.total_violations,
            "violations": self.violations,
            "exhaustions": self.exhaustions,
            "notes": self.notes,
            "config": self.config.to_json(),
        }
        if timing:
            d["wall_time"] = round(self.wall_time, 3)
        return d

    def dumps(self, timing: bool = True) -> str:
        return json.dumps(self.to_json(timing), indent=2, sort_keys=True)

    def table(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        rows = [
            ("suite", self.name),
            ("status", status),
            ("instances", str(self.instances)),
            ("violations", str(self.total_violations)),
            ("fuel exhaustions", str(self.exhaustions)),
            ("wall time", f"{self.wall_time:.2f}s"),
        ]
        rows += [("note", n) for n in self.notes]
        for v in self.violations:
            rows.append(("counterexample", json.dumps(v, sort_keys=True)))
        w = max(len(k) for k, _ in rows)
        return "\n".join(f"{k.ljust(w)}  {v}" for k, v in rows)


class _Collector:
    """Keeps the smallest violations by (complexity, print) of their key term."""

    def __init__(self, report: SuiteReport):
        self.report = report
        self._kept: list = []

    def add(self, key_term: Term, detail: dict):
        self.report.total_violations += 1
        self._kept.append((term_order_key(key_term), detail))
        cap = self.report.config.max_reported
        if len(self._kept) > 4 * cap:
            self._kept.sort(key=lambda p: p[0])
            del self._kept[cap:]

    def finish(self):
        self._kept.sort(key=lambda p: p[0])
        self.report.violations = [d for _, d in self._kept[: self.report.config.max_reported]]


SUITES: dict[str, Callable] = {}
CHECKS: dict[str, Callable] = {}


def _suite(name):
    def deco(fn):
        SUITES[name] = fn
        return fn

    return deco


def run_suite(name: str, cfg: Optional[EnumConfig] = None) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(sorted(SUITES))}")
    cfg = cfg or default_config(name)
    report = SuiteReport(name, cfg)
    col = _Collector(report)
    start = time.perf_counter()
    SUITES[name](cfg, report, col)
    report.wall_time = time.perf_counter() - start
    col.finish()
    return report


def replay(name: str, violation: dict, cfg: Optional[EnumConfig] = None) -> bool:
    """Re-run the check behind a reported violation; True if it still fails."""
    cfg = cfg or default_config(name)
    return CHECKS[name](violation["instance"], cfg) is not None


# bounds used by the acceptance run
_DEFAULTS = {
    "subject_reduction": dict(max_term_size=7),
    "confluence": dict(max_term_size=6),
    "strong_normalization": dict(max_term_size=7),
    "leftmost_termination": dict(max_term_size=6, fuel=1000),
    "sub1": dict(max_term_size=5, samples=500),
    "ynorm": dict(max_term_size=6, fuel=500),
    "yredex": dict(max_term_size=6),
    "ytype2": dict(max_term_size=6),
    "saturation": dict(max_term_size=4, free_lvars=("g0", "g1"), free_mvars=("'d0",), samples=300),
    "correctness": dict(max_term_size=5, samples=100),
    "fatiguant": dict(max_term_size=5, free_lvars=("g0",), free_mvars=("'d2",), max_type_complexity=2),
    "theorem_example": dict(max_term_size=5, free_lvars=(), free_mvars=()),
    "model_laws": dict(max_term_size=4, free_lvars=("g0", "g1", "g2"), free_mvars=("'d0", "'d2"), samples=200),
    "completeness": dict(max_term_size=6, free_lvars=(), free_mvars=(), samples=100),
}


def default_config(name: str, **overrides) -> EnumConfig:
    return EnumConfig(**{**_DEFAULTS.get(name, {}), **overrides})


def _t(term: Term) -> str:
    return str(term)


def _fresh_y(t: Term, base: str = "y") -> str:
    return fresh_name(base, all_names(t)) if base in all_names(t) else base


# ---------------------------------------------------------------------------
# subject reduction, confluence, normalization


def _check_sr(t: Term, typing, rs=None, solved=None) -> Optional[dict]:
    gamma, delta, ty = typing
    for pos, s in reducts(t) if rs is None else rs:
        if not typable_at(gamma, delta, s, ty, solved):
            return {"instance": {"term": _t(t)}, "reduct": _t(s), "position": str(pos)}
    return None


def _replay_sr(inst, cfg):
    t = parse_term(inst["term"])
    pt = principal_typing(t)
    if pt is None:
        return {"instance": inst, "error": "term is not typable"}
    v = _check_sr(t, pt)
    if v is not None:
        v["type"] = str(pt[2])
    return v


CHECKS["subject_reduction"] = _replay_sr


@_suite("subject_reduction")
def _subject_reduction(cfg, report, col):
    """Every one-step reduct of a typable term keeps its principal typing."""
    for c in range(cfg.max_term_size + 1):
        tt = TypedTerms(c, cfg.free_lvars, cfg.free_mvars)
        gamma, delta, goal, _ = tt.raw_typing()
        n = 0
        for t in tt:
            n += 1
            rs = reducts(t)
            if not rs:
                continue
            v = _check_sr(t, (gamma, delta, goal), rs, tt._u.binding.copy())
            if v is not None:
                v["type"] = str(tt.typing()[2])
                col.add(t, v)
        report.instances += n


def _leftmost_nf_key(t: Term, fuel: int):
    r = normalize(t, "leftmost", fuel)
    return alpha_key(r.term) if isinstance(r, NormalForm) else None


def _check_confluence(t: Term, fuel: int):
    """None, or a violation dict, plus whether BFS joining ran out of fuel."""
    red = [s for _, s in reducts(t)]
    if len(red) < 2:
        return None
    keys = [_leftmost_nf_key(s, fuel) for s in red]
    for i in range(len(red)):
        for j in range(i + 1, len(red)):
            if keys[i] is not None and keys[i] == keys[j]:
                continue
            if joinable(red[i], red[j], fuel) is None:
                return {"instance": {"term": _t(t)}, "left": _t(red[i]), "right": _t(red[j]), "fuel": fuel}
    return None


CHECKS["confluence"] = lambda inst, cfg: _check_confluence(parse_term(inst["term"]), cfg.fuel)


@_suite("confluence")
def _confluence(cfg, report, col):
    """Every pair of one-step reducts has a common reduct.

    Pairs whose leftmost normal forms coincide are joined by those normal
    forms; the rest go to bidirectional breadth-first search.
    """
    for t in terms_upto(cfg.max_term_size, cfg.free_lvars, cfg.free_mvars):
        report.instances += 1
        if len(redexes(t)) < 2:
            continue
        v = _check_confluence(t, cfg.fuel)
        if v is not None:
            col.add(t, v)


OMEGA = App(Lam("x", App(LVar("x"), LVar("x"))), Lam("x", App(LVar("x"), LVar("x"))))


def _check_sn(t: Term, bound: int):
    if longest_reduction(t, bound) is None:
        return {"instance": {"term": _t(t)}, "state_bound": bound}
    return None


CHECKS["strong_normalization"] = lambda inst, cfg: _check_sn(parse_term(inst["term"]), cfg.state_bound)


@_suite("strong_normalization")
def _strong_normalization(cfg, report, col):
    """Every reduction sequence from a typable term is finite (longest one found within the state bound)."""
    for c in range(cfg.max_term_size + 1):
        for t in TypedTerms(c, cfg.free_lvars, cfg.free_mvars):
            report.instances += 1
            if is_normal(t):
                continue
            if _check_sn(t, cfg.state_bound) is not None:
                report.exhaustions += 1
                col.add(t, _check_sn(t, cfg.state_bound))
    control = longest_reduction(OMEGA, cfg.state_bound)
    if control is None:
        report.notes.append(f"control {OMEGA} exhausted the bound as expected")
    else:
        col.add(OMEGA, {"instance": {"term": _t(OMEGA)}, "error": "control term did not exhaust the bound"})


def _check_leftmost(t: Term, fuel: int):
    if leftmost_length(t, fuel) is None:
        return {"instance": {"term": _t(t)}, "fuel": fuel}
    return None


CHECKS["leftmost_termination"] = lambda inst, cfg: _check_leftmost(parse_term(inst["term"]), cfg.fuel)


@_suite("leftmost_termination")
def _leftmost_termination(cfg, report, col):
    """Leftmost reduction of every typable term stops within fuel."""
    for c in range(cfg.max_term_size + 1):
        for t in TypedTerms(c, cfg.free_lvars, cfg.free_mvars):
            report.instances += 1
            v = _check_leftmost(t, cfg.fuel)
            if v is not None:
                report.exhaustions += 1
                col.add(t, v)


# ---------------------------------------------------------------------------
# substitution commutes with reduction


def _random_subst(rng: random.Random, t: Term, small: list) -> Substitution:
    lv, mv = free_vars(t)
    lmap, mmap = {}, {}
    for x in sorted(lv):
        if rng.random() < 0.6:
            lmap[x] = rng.choice(small)
    for a in sorted(mv):
        if rng.random() < 0.7:
            mmap[a] = tuple(rng.choice(small) for _ in range(rng.randint(0, 2)))
    return Substitution(lmap, mmap)


def _subst_json(s: Substitution) -> dict:
    return {
        "lambda": {x: _t(u) for x, u in sorted(s.lmap.items())},
        "mu": {a: [_t(u) for u in vs] for a, vs in sorted(s.mmap.items())},
    }


def _subst_from_json(d: dict) -> Substitution:
    return Substitution(
        {x: parse_term(u) for x, u in d["lambda"].items()},
        {a: tuple(parse_term(u) for u in vs) for a, vs in d["mu"].items()},
    )


def _check_sub1(t: Term, pos: RedexPosition, s: Substitution, fuel: int):
    t2 = step_at(t, pos)
    target = alpha_key(subst_simultaneous(t2, s))
    start = subst_simultaneous(t, s)
    res = search_reducts(start, lambda u: alpha_key(u) == target, fuel)
    if res.answer is not Answer.YES:
        return {
            "instance": {"term": _t(t), "path": list(pos.path), "rule": pos.rule, "subst": _subst_json(s)},
            "answer": res.answer.value,
        }
    return None


def _replay_sub1(inst, cfg):
    return _check_sub1(
        parse_term(inst["term"]),
        RedexPosition(tuple(inst["path"]), inst["rule"]),
        _subst_from_json(inst["subst"]),
        cfg.fuel,
    )


CHECKS["sub1"] = _replay_sub1


@_suite("sub1")
def _sub1(cfg, report, col):
    """Seeded (t, t', sigma) with t -> t': t.sigma reaches t'.sigma."""
    rng = random.Random(cfg.seed)
    pool = [t for t in terms_upto(cfg.max_term_size, cfg.free_lvars, cfg.free_mvars) if not is_normal(t)]
    small = list(terms_upto(2, cfg.free_lvars, cfg.free_mvars))
    if not pool:
        report.notes.append("no term with a redex at this size")
        return
    for _ in range(cfg.samples):
        t = rng.choice(pool)
        pos = rng.choice(redexes(t))
        s = _random_subst(rng, t, small)
        report.instances += 1
        v = _check_sub1(t, pos, s, cfg.fuel)
        if v is not None:
            if v["answer"] == "unknown":
                report.exhaustions += 1
            col.add(t, v)


# ---------------------------------------------------------------------------
# y-variables


def _check_ynorm(t: Term, fuel: int):
    if isinstance(normalize(t, "leftmost", fuel), NormalForm):
        return None
    y = _fresh_y(t)
    if isinstance(normalize(App(t, LVar(y)), "leftmost", fuel), NormalForm):
        return {"instance": {"term": _t(t)}, "y": y, "fuel": fuel}
    return None


CHECKS["ynorm"] = lambda inst, cfg: _check_ynorm(parse_term(inst["term"]), cfg.fuel)


@_suite("ynorm")
def _ynorm(cfg, report, col):
    """If (t y) normalizes for a fresh y then so does t."""
    for t in terms_upto(cfg.max_term_size, cfg.free_lvars, cfg.free_mvars):
        report.instances += 1
        v = _check_ynorm(t, cfg.fuel)
        if v is not None:
            col.add(t, v)


def _graph_with_parents(root: Term, bound: int):
    """BFS over reducts recording, for each term, one incoming edge."""
    k0 = alpha_key(root)
    nodes = {k0: root}
    parent: dict = {k0: None}
    edges = []
    order = [k0]
    i = 0
    while i < len(order):
        if len(order) > bound:
            return nodes, parent, edges, False
        k = order[i]
        i += 1
        for pos, nxt in reducts(nodes[k]):
            nk = alpha_key(nxt)
            edges.append((k, pos, nk))
            if nk not in nodes:
                nodes[nk] = nxt
                parent[nk] = (k, pos)
                order.append(nk)
    return nodes, parent, edges, True


def _trace_to(nodes, parent, k, root):
    steps = []
    while parent[k] is not None:
        pk, pos = parent[k]
        steps.append(Step(pos, nodes[k]))
        k = pk
    steps.reverse()
    return ReductionTrace(root, steps, "positional", len(steps))


def _check_yredex(t: Term, bound: int):
    y = _fresh_y(t)
    root = App(t, LVar(y))
    nodes, parent, _, complete = _graph_with_parents(root, bound)
    if not complete:
        return {"instance": {"term": _t(t)}, "error": "reduction graph exceeds the state bound"}
    for k in nodes:
        if parent[k] is None:
            continue
        tr = _trace_to(nodes, parent, k, root)
        if not yredex_audit(t, y, tr):
            return {"instance": {"term": _t(t)}, "y": y, "trace": tr.to_json()}
    return None


CHECKS["yredex"] = lambda inst, cfg: _check_yredex(parse_term(inst["term"]), cfg.state_bound)


@_suite("yredex")
def _yredex(cfg, report, col):
    """Every term reachable from (t y), t normal, has only y-redexes right under a name."""
    for t in terms_upto(cfg.max_term_size, cfg.free_lvars, cfg.free_mvars):
        if not is_normal(t):
            continue
        report.instances += 1
        v = _check_yredex(t, cfg.state_bound)
        if v is not None:
            col.add(t, v)


def _with_y(typing, y: str):
    gamma, delta, ty = typing
    if y in gamma:
        return gamma, delta, ty
    used = set()
    for a in list(gamma.values()) + list(delta.values()) + [ty]:
        used.update(type_holes(a))
    return {**gamma, y: Hole(max(used, default=-1) + 1)}, delta, ty


def _transport_one(s: Term, s2: Term, y: str, trace: ReductionTrace):
    """Type s2 principally (with y declared), pull the derivation back to s."""
    pt = principal_typing(s2)
    if pt is None:
        return None
    gamma, delta, ty = _with_y(pt, y)
    _, d = infer(gamma, delta, s2)
    back = transport_ytype2(s, s2, y, d, trace)
    ok = (
        verify_derivation(back)
        and alpha_key(back.subject) == alpha_key(s)
        and back.goal == ty
        and check(gamma, delta, s, ty)
    )
    return ok


def _check_ytype2(t: Term, bound: int):
    y = _fresh_y(t)
    root = App(t, LVar(y))
    nodes, parent, edges, complete = _graph_with_parents(root, bound)
    count = 0
    for k, pos, nk in edges:
        s, s2 = nodes[k], nodes[nk]
        if not is_y_redex(subterm_at(s, pos.path), y):
            continue
        tr = ReductionTrace(s, [Step(pos, step_at(s, pos))], "positional", 1)
        count += 1
        if _transport_one(s, tr.final, y, tr) is False:
            return count, {"instance": {"term": _t(t)}, "from": _t(s), "to": _t(s2), "position": str(pos)}
    # whole traces from the root to every reachable term
    for k in nodes:
        if parent[k] is None:
            continue
        tr = _trace_to(nodes, parent, k, root)
        count += 1
        if _transport_one(root, tr.final, y, tr) is False:
            return count, {"instance": {"term": _t(t)}, "from": _t(root), "to": _t(tr.final), "trace": tr.to_json()}
    return count, None


CHECKS["ytype2"] = lambda inst, cfg: _check_ytype2(parse_term(inst["term"]), cfg.state_bound)[1]


@_suite("ytype2")
def _ytype2(cfg, report, col):
    """Typings of y-redex contracta transport back to the redex side and recheck."""
    contractions = 0
    for t in terms_upto(cfg.max_term_size, cfg.free_lvars, cfg.free_mvars):
        if not is_normal(t):
            continue
        report.instances += 1
        n, v = _check_ytype2(t, cfg.state_bound)
        contractions += n
        if v is not None:
            col.add(t, v)
    report.notes.append(f"{contractions} contractions and traces transported")


# ---------------------------------------------------------------------------
# realizability: shared helpers


def _ground(ty: Type, choice: Callable[[int], Type]) -> Type:
    if type(ty) is Hole:
        return choice(ty.id)
    if type(ty) is Arrow:
        return Arrow(_ground(ty.dom, choice), _ground(ty.cod, choice))
    return ty


def _ground_random(rng: random.Random, ty: Type, atoms, cache: Optional[dict] = None) -> Type:
    """Replace every hole by a random atom, the same atom for the same hole."""
    cache = {} if cache is None else cache

    def pick(i):
        if i not in cache:
            cache[i] = rng.choice(atoms)
        return cache[i]

    return _ground(ty, pick)


def _types_upto(c: int, atoms: tuple) -> list[Type]:
    from lambdamu.realizability import _types_of_complexity

    out = []
    for k in range(c + 1):
        out.extend(sorted(_types_of_complexity(k, atoms), key=str))
    return out


def _split(a: Type):
    args = []
    while type(a) is Arrow:
        args.append(a.dom)
        a = a.cod
    return tuple(args), a


# ---------------------------------------------------------------------------
# saturation


@_suite("saturation")
def _saturation(cfg, report, col):
    """Bottoms, arrows between them, and weak-head expansions are closed under anti-reduction.

    Runs on the completeness model with terms over the given pool names.
    """
    cm = build_completeness_model(cfg.atom_alphabet)
    fuel = cfg.fuel
    terms = list(terms_upto(cfg.max_term_size, cfg.free_lvars, cfg.free_mvars))
    types = _types_upto(min(cfg.max_type_complexity, 1), cm.xs)
    for v in terms:
        if is_normal(v):
            continue
        nodes, _, _, complete = _graph_with_parents(v, cfg.state_bound)
        for a in types:
            ins = {k: membership_direct(u, a, cm, fuel) for k, u in nodes.items()}
            if any(x is Answer.YES for x in ins.values()):
                report.instances += 1
                mine = membership_direct(v, a, cm, fuel)
                if mine is not Answer.YES:
                    col.add(v, {"instance": {"term": _t(v), "type": str(a)}, "answer": mine.value})
    rng = random.Random(cfg.seed)
    small = [t for t in terms_upto(2, cfg.free_lvars, cfg.free_mvars)]
    bodies = [t for t in terms if complexity(t) < cfg.max_term_size]
    for _ in range(cfg.samples):
        a = rng.choice(types)
        if rng.random() < 0.5:
            x = fresh_name("w", cfg.free_lvars)
            u = rng.choice(bodies)
            u = subst_lambda(u, rng.choice(cfg.free_lvars), LVar(x)) if cfg.free_lvars else u
            v = rng.choice(small)
            ws = tuple(rng.choice(small) for _ in range(rng.randint(0, 1)))
            contractum = apply_seq(subst_lambda(u, x, v), ws)
            redex = apply_seq(App(Lam(x, u), v), ws)
        else:
            al = "'k"
            u = rng.choice(bodies)
            if cfg.free_mvars:
                u = rename_mu(u, rng.choice(cfg.free_mvars), al)
            vs = tuple(rng.choice(small) for _ in range(rng.randint(1, 2)))
            contractum = Mu(al, subst_structural(u, al, vs))
            redex = apply_seq(Mu(al, u), vs)
        if membership_direct(contractum, a, cm, fuel) is Answer.YES:
            report.instances += 1
            got = membership_direct(redex, a, cm, fuel)
            if got is not Answer.YES:
                col.add(redex, {"instance": {"term": _t(redex), "type": str(a)}, "contractum": _t(contractum), "answer": got.value})


def _replay_membership(inst, cfg):
    cm = build_completeness_model(cfg.atom_alphabet)
    got = membership_direct(parse_term(inst["term"]), parse_type(inst["type"]), cm, cfg.fuel)
    return None if got is Answer.YES else {"instance": inst, "answer": got.value}


CHECKS["saturation"] = _replay_membership


# ---------------------------------------------------------------------------
# correctness


def _check_correct(t: Term, a: Type, cm, ex, fuel: int):
    bad = {}
    r = general_membership(t, a, fuel)
    if r.answer is not Answer.YES:
        bad["general"] = r.answer.value
    if membership_completeness(t, a, cm, fuel) is not Answer.YES:
        bad["completeness"] = "not yes"
    if membership_direct(t, a, cm, fuel) is not Answer.YES:
        bad["completeness_direct"] = "not yes"
    m, interp = ex
    ea = _rename_atoms(a, "X")
    if membership(m, interp_type(interp, ea), t, fuel, example_sampler("x", ("y1", "y2"))) is not Answer.YES:
        bad["example"] = str(ea)
    if bad:
        return {"instance": {"term": _t(t), "type": str(a)}, **bad}
    return None


def _rename_atoms(a: Type, name: str) -> Type:
    if type(a) is Atom:
        return Atom(name)
    if type(a) is Arrow:
        return Arrow(_rename_atoms(a.dom, name), _rename_atoms(a.cod, name))
    return a


def _adq_instance(rng, t, gamma, delta, ty, cm, closed_by_type):
    """Ground a typing and build sigma from members of I(A_k) and orthogonals of I(B_r)."""
    cache: dict = {}

    def g(a):
        return _ground_random(rng, a, cm.xs, cache)

    gamma = {x: g(a) for x, a in gamma.items()}
    delta = {al: g(a) for al, a in delta.items()}
    ty = g(ty)
    interp = cm.interpretation()
    spec = cm.spec()
    lmap = {}
    used = set()
    for x, a in sorted(gamma.items()):
        opts = []
        for name in cm.lvars_of_type(a):
            if name not in used:
                opts.append(LVar(name))
                used.add(name)
                break
        opts.extend(closed_by_type.get(a, [])[:3])
        lmap[x] = rng.choice(opts)
    mmap = {}
    renames = {}
    for al, b in sorted(delta.items()):
        w = w_index(interp_type(interp, b), spec)
        target = next(n for n in cm.mvars_of_type(cm.xs[w]) if n not in renames.values())
        renames[al] = target
        args, _ = _split(b)
        vs = []
        for arg in args:
            name = next(n for n in cm.lvars_of_type(arg) if n not in used)
            used.add(name)
            vs.append(LVar(name))
        mmap[target] = tuple(vs)
    for al, target in renames.items():
        t = rename_mu(t, al, target)
    return t, Substitution(lmap, mmap), ty


@_suite("correctness")
def _correctness(cfg, report, col):
    """Closed typable terms are in every interpretation of their type; sigma-instances of typed terms too."""
    cm = build_completeness_model(cfg.atom_alphabet)
    ex = build_example_model()
    rng = random.Random(cfg.seed)
    closed = []
    for c in range(cfg.max_term_size + 1):
        tt = TypedTerms(c, (), ())
        for t in tt:
            closed.append((t, tt.typing()[2]))
    closed_by_type: dict = {}
    for t, ty in closed:
        if not type_holes(ty):
            closed_by_type.setdefault(ty, []).append(t)
    for t, ty in closed:
        for a in {_ground(ty, lambda i: cm.xs[(i + k) % len(cm.xs)]) for k in range(len(cm.xs))}:
            report.instances += 1
            v = _check_correct(t, a, cm, ex, cfg.fuel)
            if v is not None:
                col.add(t, v)
    # substitution instances of open typed terms
    opened = []
    for c in range(min(cfg.max_term_size, 4) + 1):
        tt = TypedTerms(c, cfg.free_lvars, cfg.free_mvars)
        for t in tt:
            g, d, ty = tt.typing()
            lv, mv = free_vars(t)
            opened.append((t, {x: g[x] for x in lv}, {a: d[a] for a in mv}, ty))
    for _ in range(cfg.samples):
        t, g, d, ty = rng.choice(opened)
        t2, s, a = _adq_instance(rng, t, g, d, ty, cm, closed_by_type)
        ts = subst_simultaneous(t2, s)
        report.instances += 1
        got = membership_completeness(ts, a, cm, cfg.fuel)
        direct = membership_direct(ts, a, cm, cfg.fuel)
        if got is not Answer.YES or direct is not Answer.YES:
            col.add(t, {"instance": {"term": _t(ts), "type": str(a)}, "from": _t(t2), "subst": _subst_json(s),
                        "completeness": got.value, "direct": direct.value})


def _replay_correct(inst, cfg):
    cm = build_completeness_model(cfg.atom_alphabet)
    t, a = parse_term(inst["term"]), parse_type(inst["type"])
    if is_closed(t):
        return _check_correct(t, a, cm, build_example_model(), cfg.fuel)
    return _replay_membership(inst, cfg)


CHECKS["correctness"] = _replay_correct


# ---------------------------------------------------------------------------
# the completeness model


def _check_fatiguant(t: Term, a: Type, cm, fuel: int):
    one = membership_completeness(t, a, cm, fuel)
    two = membership_direct(t, a, cm, fuel)
    if one.definite and two.definite and one is not two:
        return {"instance": {"term": _t(t), "type": str(a)}, "check_star": one.value, "direct": two.value}, one, two
    return None, one, two


def _replay_fatiguant(inst, cfg):
    cm = build_completeness_model(cfg.atom_alphabet)
    return _check_fatiguant(parse_term(inst["term"]), parse_type(inst["type"]), cm, cfg.fuel)[0]


CHECKS["fatiguant"] = _replay_fatiguant


@_suite("fatiguant")
def _fatiguant(cfg, report, col):
    """Typing up to reduction in the fixed contexts agrees with membership in the interpretation."""
    cm = build_completeness_model(cfg.atom_alphabet)
    types = _types_upto(cfg.max_type_complexity, cm.xs)
    tally = {"yes": 0, "no": 0, "unknown": 0}
    witness_escapes = 0
    for t in terms_upto(cfg.max_term_size, cfg.free_lvars, cfg.free_mvars):
        lv, mv = free_vars(t)
        for a in types:
            report.instances += 1
            v, one, two = _check_fatiguant(t, a, cm, cfg.fuel)
            tally[one.value] += 1
            if not (one.definite and two.definite):
                report.exhaustions += 1
            if v is not None:
                col.add(t, v)
            if one is Answer.YES:
                w = cm.star(t, a, cfg.fuel).witness
                wl, wm = free_vars(w)
                if not (wl <= lv and wm <= mv):
                    witness_escapes += 1
                    col.add(t, {"instance": {"term": _t(t), "type": str(a)}, "witness": _t(w),
                                "error": "witness has free variables the term lacks"})
    report.notes.append("check_star answers: " + ", ".join(f"{k}={n}" for k, n in tally.items()))


@_suite("model_laws")
def _model_laws(cfg, report, col):
    """Both laws linking C_i, B_0 and B_i, on seeded samples."""
    cm = build_completeness_model(cfg.atom_alphabet)
    spec = cm.spec()
    rng = random.Random(cfg.seed)
    extra = "'k"
    terms = list(terms_upto(cfg.max_term_size, cfg.free_lvars, cfg.free_mvars + (extra,)))
    members: dict = {i: [] for i in range(len(cm.xs))}
    for u in terms:
        for i in range(len(cm.xs)):
            if cm.star(u, cm.xs[i], cfg.fuel).answer is Answer.YES:
                members[i].append(u)
    applied = {"mu": 0, "named": 0}
    for _ in range(cfg.samples):
        i = rng.randrange(len(cm.xs))
        alpha = cm.cvar(i, rng.randrange(3))
        pick = rng.random()
        if pick < 0.4 and members[0]:
            u = rng.choice(members[0])
        elif pick < 0.8 and members[i]:
            u = rng.choice(members[i])
        else:
            u = rng.choice(terms)
        # a body mentioning the extra name exercises the renaming form of law 1
        beta = extra if extra in free_vars(u)[1] else alpha
        report.instances += 1
        res = model_law_check(spec, i, alpha, u, beta, cfg.fuel)
        for law, ok in res.items():
            if ok is not None:
                applied[law] += 1
            if ok is False:
                col.add(u, {"instance": {"index": i, "alpha": alpha, "term": _t(u), "beta": beta}, "law": law})
    report.notes.append(f"premise held: law 1 (mu) {applied['mu']} times, law 2 (named) {applied['named']} times")


def _replay_law(inst, cfg):
    cm = build_completeness_model(cfg.atom_alphabet)
    bad = model_law_violations(cm.spec(), [(inst["index"], inst["alpha"], parse_term(inst["term"]), inst["beta"])], cfg.fuel)
    return {"instance": inst, "law": bad[0][0]} if bad else None


CHECKS["model_laws"] = _replay_law


# ---------------------------------------------------------------------------
# closed terms and the general interpretation


def _check_general_pair(u: Term, a: Type, fuel: int):
    r = general_membership(u, a, fuel)
    nf = normalize(u, "leftmost", fuel)
    if r.answer is not Answer.YES or not isinstance(nf, NormalForm):
        return {"instance": {"term": _t(u), "type": str(a), "expect": "yes"}, "answer": r.answer.value,
                "normalizable": isinstance(nf, NormalForm)}
    return None


def _check_general_no(t: Term, a: Type, fuel: int):
    r = general_membership(t, a, fuel)
    if r.answer is not Answer.NO:
        return {"instance": {"term": _t(t), "type": str(a), "expect": "no"}, "answer": r.answer.value}
    return None


def _replay_general(inst, cfg):
    t, a = parse_term(inst["term"]), parse_type(inst["type"])
    if inst["expect"] == "yes":
        return _check_general_pair(t, a, cfg.fuel)
    return _check_general_no(t, a, cfg.fuel)


CHECKS["completeness"] = _replay_general


def _expand(rng, t: Term, junk: list) -> Term:
    """A term reducing to ``t``: wrap a random subterm in a beta or mu expansion."""
    paths = []
    stack = [(t, ())]
    while stack:
        s, p = stack.pop()
        paths.append(p)
        if type(s) is App:
            stack.append((s.fun, p + (0,)))
            stack.append((s.arg, p + (1,)))
        elif type(s) is not LVar:
            stack.append((s.body, p + (0,)))
    p = rng.choice(sorted(paths))
    s = subterm_at(t, p)
    names = all_names(t)
    w = fresh_name("w", names)
    if rng.random() < 0.6:
        new = App(Lam(w, s), rng.choice(junk))
    else:
        new = App(Lam(w, App(LVar(w), s)), Lam(w, LVar(w)))
    return replace_at(t, p, new)


@_suite("completeness")
def _completeness(cfg, report, col):
    """Closed typable terms and their anti-reducts are in |A| and normalizable; untypable normal closed terms are not."""
    rng = random.Random(cfg.seed)
    atoms = (BOT,) + tuple(Atom(a) for a in cfg.atom_alphabet)
    typed = []
    for c in range(1, cfg.max_term_size + 1):
        tt = TypedTerms(c, (), ())
        for t in tt:
            typed.append((t, tt.typing()[2]))
    closed_all = list(terms_upto(cfg.max_term_size, (), ()))
    junk = [t for t in closed_all if not is_normal(t)][:200] + [OMEGA]
    # redexes whose reducts are typable though the redex itself may not be
    untyped_pairs = []
    for u in closed_all:
        if is_normal(u) or principal_typing(u) is not None:
            continue
        r = normalize(u, "leftmost", cfg.fuel)
        if isinstance(r, NormalForm):
            pt = principal_typing(r.term)
            if pt is not None:
                untyped_pairs.append((u, pt[2]))
    for n in range(cfg.samples):
        if n % 2 == 0 and untyped_pairs:
            u, ty = rng.choice(untyped_pairs)
        else:
            t, ty = rng.choice(typed)
            u = _expand(rng, t, junk)
        a = _ground_random(rng, ty, atoms)
        report.instances += 1
        v = _check_general_pair(u, a, cfg.fuel)
        if v is not None:
            col.add(u, v)
    types = _types_upto(cfg.max_type_complexity, atoms)
    normal_closed = [t for t in closed_all if is_normal(t)]
    negatives = []
    tries = 0
    while len(negatives) < cfg.samples and tries < 100 * cfg.samples:
        tries += 1
        t, a = rng.choice(normal_closed), rng.choice(types)
        if not check({}, {}, t, a):
            negatives.append((t, a))
    for t, a in negatives:
        report.instances += 1
        v = _check_general_no(t, a, cfg.fuel)
        if v is not None:
            col.add(t, v)
    report.notes.append(f"{len(negatives)} negative instances, {len(untyped_pairs)} untypable redexes available")


@_suite("theorem_example")
def _theorem_example(cfg, report, col):
    """Closed E accepted at bot -> X sends (E x ys) to a mu-prefixed x."""
    x, ys = "x", ("y1", "y2")
    goal = Arrow(BOT, Atom("X"))
    m, interp = build_example_model(x, ys)
    g = interp_type(interp, goal)
    sample = example_sampler(x, ys)
    for t in terms_upto(cfg.max_term_size, (), ()):
        if not check({}, {}, t, goal):
            continue
        report.instances += 1
        v = _check_theorem_example(t, x, ys, cfg.fuel)
        if v is None and membership(m, g, t, cfg.fuel, sample) is not Answer.YES:
            v = {"instance": {"term": _t(t)}, "error": "not in the interpretation of bot -> X"}
        if v is not None:
            col.add(t, v)


def _check_theorem_example(e: Term, x: str, ys: tuple, fuel: int):
    for k in range(len(ys) + 1):
        start = apply_seq(e, (LVar(x),) + tuple(LVar(y) for y in ys[:k]))
        r = normalize(start, "leftmost", fuel)
        if not isinstance(r, NormalForm) or not is_mu_prefixed(r.term, x):
            return {"instance": {"term": _t(e)}, "args": k + 1, "result": _t(r.term)}
    return None


CHECKS["theorem_example"] = lambda inst, cfg: _check_theorem_example(parse_term(inst["term"]), "x", ("y1", "y2"), cfg.fuel)


def suite_names() -> list[str]:
    return sorted(SUITES)
