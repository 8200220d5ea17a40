"""Realizability models, interpretations and the completeness term model.

The sets of a model are infinite, so every bottom ``B_i`` is presented as
a membership oracle ``(term, fuel) -> Answer``, and arrows between sets
are checked against finite samples of known members.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Optional, Union

from lambdamu.reduction import SearchResult, search_candidates, search_reducts
from lambdamu.subst import rename_mu
from lambdamu.syntax import (
    BOT,
    Arrow,
    Atom,
    Bot,
    Lam,
    LVar,
    Mu,
    Named,
    Term,
    Type,
    apply_seq,
    complexity_type,
    free_vars,
    fresh_name,
    is_closed,
)
from lambdamu.tristate import Answer, all_of
from lambdamu.typecheck import (
    Unifier,
    _infer,
    is_instance,
    typable_at,
)

Oracle = Callable[[Term, int], Answer]


class UnassignedAtom(KeyError):
    pass


class PoolsNotDisjoint(ValueError):
    pass


# ---------------------------------------------------------------------------
# elements of |M|


@dataclass(frozen=True)
class BaseB:
    i: int

    def __str__(self) -> str:
        return f"B{self.i}"


@dataclass(frozen=True)
class BaseR:
    j: int

    def __str__(self) -> str:
        return f"R{self.j}"


@dataclass(frozen=True)
class ArrowE:
    left: "ElementDescriptor"
    right: "ElementDescriptor"

    def __str__(self) -> str:
        left = str(self.left)
        if isinstance(self.left, ArrowE):
            left = f"({left})"
        return f"{left} ~> {self.right}"


ElementDescriptor = Union[BaseB, BaseR, ArrowE]


@dataclass(frozen=True)
class RSet:
    """``R_j = X_j ~> B_target`` for a finite set of argument sequences ``X_j``."""

    generators: tuple
    target: int


@dataclass
class ModelSpec:
    """``<(C_i), (B_i), (R_j)>``.

    ``bottoms`` and ``cvar_index`` may be functions so that the index set
    can be all of the naturals (``index_set=None``).
    """

    bottoms: Union[Mapping[int, Oracle], Callable[[int], Oracle]]
    cvar_index: Callable[[str], Optional[int]]
    cvar: Callable[[int, int], str]
    rsets: Mapping[int, RSet] = field(default_factory=dict)
    index_set: Optional[frozenset] = None
    name: str = "model"

    def __post_init__(self):
        if self.index_set is not None and 0 not in self.index_set:
            raise ValueError("the index set must contain 0")

    def has_index(self, i: int) -> bool:
        return i >= 0 if self.index_set is None else i in self.index_set

    def bottom(self, i: int) -> Oracle:
        if not self.has_index(i):
            raise KeyError(f"no bottom B{i}")
        if callable(self.bottoms) and not isinstance(self.bottoms, Mapping):
            return self.bottoms(i)
        return self.bottoms[i]


def w_index(g: ElementDescriptor, m: ModelSpec) -> int:
    """Index of the bottom that ``g`` is an orthogonal of (syntactic recursion)."""
    while isinstance(g, ArrowE):
        g = g.right
    if isinstance(g, BaseB):
        return g.i
    return m.rsets[g.j].target


def w_index_candidates(g: ElementDescriptor, m: ModelSpec, probes, sample, fuel: int = 200) -> list[int]:
    """Indices ``i < w_index(g)`` that no probe term separates from ``g``.

    A bounded diagnostic only: ``g`` agreeing with ``gens(g) ~> B_i`` on
    finitely many probes is evidence, not proof, of a smaller witness.
    """
    w = w_index(g, m)
    gens = orthogonal_generators(g, m, sample)
    out = []
    for i in range(w):
        if not m.has_index(i):
            continue
        b = m.bottom(i)
        agree = True
        for t in probes:
            mine = membership(m, g, t, fuel, sample)
            other = all_of(b(apply_seq(t, v), fuel) for v in gens)
            if mine.definite and other.definite and mine is not other:
                agree = False
                break
        if agree:
            out.append(i)
    return out


def _samples_for(sample, g) -> list:
    if sample is None:
        raise ValueError(f"a sample of members of {g} is needed")
    if callable(sample) and not isinstance(sample, Mapping):
        return list(sample(g))
    return list(sample.get(g, ()))


def orthogonal_generators(g: ElementDescriptor, m: ModelSpec, sample=None) -> list[tuple]:
    """Finite under-approximation of the orthogonal of ``g``.

    ``sample`` supplies known members for each left-hand descriptor met on
    the way down (a mapping or a function from descriptors to terms).
    """
    if isinstance(g, BaseB):
        return [()]
    if isinstance(g, BaseR):
        return [tuple(v) for v in m.rsets[g.j].generators]
    right = orthogonal_generators(g.right, m, sample)
    return [(u,) + v for u in _samples_for(sample, g.left) for v in right]


def membership(m: ModelSpec, g: ElementDescriptor, t: Term, fuel: int = 200, sample=None) -> Answer:
    """Is ``t`` in the set described by ``g``?

    YES when ``(t vs)`` lands in the witness bottom for every generated
    ``vs``; NO as soon as one generated sequence fails.
    """
    if isinstance(g, BaseB):
        return m.bottom(g.i)(t, fuel)
    b = m.bottom(w_index(g, m))
    answers = []
    for vs in orthogonal_generators(g, m, sample):
        a = b(apply_seq(t, vs), fuel)
        if a is Answer.NO:
            return a
        answers.append(a)
    return all_of(answers)


@dataclass
class Interpretation:
    assignment: Mapping[str, ElementDescriptor]


def interp_type(interp: Interpretation, a: Type) -> ElementDescriptor:
    if isinstance(a, Bot):
        return BaseB(0)
    if isinstance(a, Atom):
        try:
            return interp.assignment[a.name]
        except KeyError:
            raise UnassignedAtom(a.name) from None
    if isinstance(a, Arrow):
        return ArrowE(interp_type(interp, a.dom), interp_type(interp, a.cod))
    raise TypeError(f"cannot interpret {a!r}")


# ---------------------------------------------------------------------------
# saturation checks on oracles


def saturation_violations(oracle: Oracle, pairs, fuel: int = 200) -> list:
    """Pairs ``(v, u)`` with ``v ->* u`` where ``u`` is in but ``v`` is not."""
    bad = []
    for v, u in pairs:
        if oracle(u, fuel) is Answer.YES and oracle(v, fuel) is not Answer.YES:
            bad.append((v, u))
    return bad


def model_law_check(m: ModelSpec, i: int, alpha: str, u: Term, beta: Optional[str] = None, fuel: int = 200) -> dict:
    """Evaluate both bottom/mu-variable laws on one instance.

    Law 1, renaming form: if ``u[beta := alpha] in B_0`` then
    ``mu beta.u in B_i``; ``beta`` defaults to ``alpha`` itself.
    Law 2: ``alpha in C_i`` and ``u in B_i`` give ``[alpha] u in B_0``.
    Returns, per law, None when the premise does not hold, else whether
    the conclusion does.
    """
    beta = alpha if beta is None else beta
    if m.cvar_index(alpha) != i:
        raise ValueError(f"{alpha} is not in C{i}")
    b0, bi = m.bottom(0), m.bottom(i)
    renamed = u if beta == alpha else rename_mu(u, beta, alpha)
    out = {"mu": None, "named": None}
    if b0(renamed, fuel) is Answer.YES:
        out["mu"] = bi(Mu(beta, u), fuel) is Answer.YES
    if bi(u, fuel) is Answer.YES:
        out["named"] = b0(Named(alpha, u), fuel) is Answer.YES
    return out


def model_law_violations(m: ModelSpec, triples, fuel: int = 200) -> list:
    """Instances ``(i, alpha, u[, beta])`` where a law's premise holds but its conclusion does not."""
    bad = []
    for tr in triples:
        i, alpha, u = tr[:3]
        beta = tr[3] if len(tr) > 3 else alpha
        res = model_law_check(m, i, alpha, u, beta, fuel)
        for law in ("mu", "named"):
            if res[law] is False:
                bad.append((law, i, alpha, u, beta))
    return bad


# ---------------------------------------------------------------------------
# the model behind the computational-behaviour example


def is_mu_prefixed(t: Term, x: str) -> bool:
    """``t`` is ``x`` under a string of mu-abstractions and named terms."""
    while type(t) in (Mu, Named):
        t = t.body
    return type(t) is LVar and t.name == x


def build_example_model(x: str = "x", ys=("y1", "y2")):
    """Model with a single bottom ``{t | t ->* mu.x}`` and ``R = {ys} ~> B_0``.

    Returns the model and the interpretation sending ``X`` to ``R``.
    """
    if x in ys or len(set(ys)) != len(ys):
        raise ValueError("x and ys must be distinct lambda-variables")

    def b0(t: Term, fuel: int) -> Answer:
        return search_reducts(t, lambda s: is_mu_prefixed(s, x), fuel).answer

    m = ModelSpec(
        bottoms={0: b0},
        cvar_index=lambda name: 0 if name.startswith("'") else None,
        cvar=lambda i, k: f"'c_{k}",
        rsets={0: RSet((tuple(LVar(y) for y in ys),), 0)},
        index_set=frozenset({0}),
        name="example",
    )
    return m, Interpretation({"X": BaseR(0)})


def example_sampler(x: str = "x", ys=("y1", "y2")):
    """Known members of the example model's sets, for probing arrows."""
    b0 = [LVar(x), Mu("'s", LVar(x))]
    r0 = [Lam("p", Lam("q", LVar(x))), Lam("p", Lam("q", Mu("'s", LVar(x))))]
    k = fresh_name("k", {x, *ys})

    def sample(g):
        if isinstance(g, BaseB):
            return b0
        if isinstance(g, BaseR):
            return r0
        # constant functions are members of any arrow whose target they inhabit
        return [Lam(k, m) for m in sample(g.right)]

    return sample


# ---------------------------------------------------------------------------
# the completeness model


def _types_of_complexity(c: int, atoms: tuple) -> list[Type]:
    if c == 0:
        return list(atoms)
    out = []
    for left in range(c):
        for a in _types_of_complexity(left, atoms):
            for b in _types_of_complexity(c - 1 - left, atoms):
                out.append(Arrow(a, b))
    return out


class TypeEnumeration:
    """An enumeration of all types in which every type occurs infinitely often.

    Distinct types are listed by complexity, ties broken by print order
    (or shuffled within a complexity band when ``seed`` is given); position
    ``n`` holds copy ``k`` of distinct type ``j`` where ``(k, j)`` is the
    Cantor pairing inverse of ``n``.
    """

    def __init__(self, atom_names=("X1", "X2"), seed: Optional[int] = None):
        self.atoms = (BOT,) + tuple(Atom(a) for a in atom_names)
        self.seed = seed
        self._distinct: list[Type] = []
        self._index: dict[Type, int] = {}
        self._band = 0

    def _extend(self, upto: int):
        while len(self._distinct) <= upto:
            band = _types_of_complexity(self._band, self.atoms)
            band.sort(key=str)
            if self.seed is not None:
                random.Random(self.seed * 1000 + self._band).shuffle(band)
            for a in band:
                self._index[a] = len(self._distinct)
                self._distinct.append(a)
            self._band += 1

    def distinct(self, j: int) -> Type:
        self._extend(j)
        return self._distinct[j]

    def type_index(self, a: Type) -> int:
        self._extend(0)
        while a not in self._index:
            self._extend(len(self._distinct))
            if self._band > complexity_type(a) + 1 and a not in self._index:
                raise ValueError(f"{a} is not over the atom alphabet")
        return self._index[a]

    def __getitem__(self, n: int) -> Type:
        s = int(((8 * n + 1) ** 0.5 - 1) // 2)
        while s * (s + 1) // 2 > n:
            s -= 1
        while (s + 1) * (s + 2) // 2 <= n:
            s += 1
        j = n - s * (s + 1) // 2
        return self.distinct(j)

    def positions(self, a: Type) -> Iterator[int]:
        """Every position holding ``a``, increasing."""
        j = self.type_index(a)
        for k in itertools.count():
            s = k + j
            yield s * (s + 1) // 2 + j


class CompletenessModel:
    """The term model built from enumerated variables and fixed contexts.

    Lambda-variables ``<lprefix><n>`` are declared at ``T1[n]`` and
    mu-variables ``<mprefix><n>`` at ``T2[n]``. ``X_0`` is ``bot`` and
    ``X_i`` (i >= 1) is the i-th atom of the alphabet. The bottom ``B_i``
    holds the terms with a reduct typable at ``X_i`` in the restriction of
    the fixed contexts to the reduct's free variables.
    """

    def __init__(
        self,
        atom_names=("X1", "X2"),
        lprefix: str = "g",
        mprefix: str = "'d",
        seed1: Optional[int] = None,
        seed2: Optional[int] = None,
        fuel: int = 200,
    ):
        if lprefix.startswith("'") or not mprefix.startswith("'"):
            raise PoolsNotDisjoint("lambda pool must be unprimed and mu pool primed")
        self.atom_names = tuple(atom_names)
        self.xs: tuple[Type, ...] = (BOT,) + tuple(Atom(a) for a in atom_names)
        self.lprefix, self.mprefix = lprefix, mprefix
        self.t1 = TypeEnumeration(atom_names, seed1)
        self.t2 = TypeEnumeration(atom_names, seed2)
        self.seeds = (seed1, seed2)
        self.fuel = fuel
        self._ptype: dict = {}
        self._candidates: dict = {}

    # pools and contexts

    def _pool_index(self, name: str, prefix: str) -> Optional[int]:
        if not name.startswith(prefix):
            return None
        rest = name[len(prefix):]
        if not rest.isdigit() or (len(rest) > 1 and rest[0] == "0"):
            return None
        return int(rest)

    def in_pool(self, name: str) -> bool:
        prefix = self.mprefix if name.startswith("'") else self.lprefix
        return self._pool_index(name, prefix) is not None

    def gamma_type(self, name: str) -> Optional[Type]:
        n = self._pool_index(name, self.lprefix)
        return None if n is None else self.t1[n]

    def delta_type(self, name: str) -> Optional[Type]:
        n = self._pool_index(name, self.mprefix)
        return None if n is None else self.t2[n]

    def lvar(self, n: int) -> str:
        return f"{self.lprefix}{n}"

    def mvar(self, n: int) -> str:
        return f"{self.mprefix}{n}"

    def lvars_of_type(self, a: Type) -> Iterator[str]:
        for n in self.t1.positions(a):
            yield self.lvar(n)

    def mvars_of_type(self, a: Type) -> Iterator[str]:
        for n in self.t2.positions(a):
            yield self.mvar(n)

    def check_disjoint(self, names) -> None:
        clash = sorted(n for n in names if self.in_pool(n))
        if clash:
            raise PoolsNotDisjoint(f"names {clash} lie in the model's variable pools")

    def restrict(self, u: Term):
        """``(G_u, D_u)``, or None if ``u`` has a free variable outside the pools."""
        lv, mv = free_vars(u)
        gamma, delta = {}, {}
        for x in lv:
            a = self.gamma_type(x)
            if a is None:
                return None
            gamma[x] = a
        for al in mv:
            a = self.delta_type(al)
            if a is None:
                return None
            delta[al] = a
        return gamma, delta

    def principal_type(self, u: Term) -> Optional[Type]:
        """Principal type of ``u`` in ``(G_u, D_u)``; None when untypable there."""
        try:
            return self._ptype[u]
        except KeyError:
            pass
        ctx = self.restrict(u)
        ty = None
        if ctx is not None:
            un = Unifier()
            raw = _infer(u, {}, ctx[0], {}, ctx[1], un)
            if raw is not None:
                ty = un.resolve(raw)
        if len(self._ptype) > 200_000:
            self._ptype.clear()
        self._ptype[u] = ty
        return ty

    def typed(self, u: Term, goal: Type) -> bool:
        """``G |- u : goal ; D`` in the restricted contexts."""
        ty = self.principal_type(u)
        return ty is not None and is_instance(ty, goal)

    # the model

    def x_index(self, a: Type) -> Optional[int]:
        try:
            return self.xs.index(a)
        except ValueError:
            return None

    def bottom(self, i: int) -> Oracle:
        goal = self.xs[i]

        def oracle(t: Term, fuel: int) -> Answer:
            return self.star(t, goal, fuel).answer

        return oracle

    def star(self, t: Term, goal: Type, fuel: Optional[int] = None) -> SearchResult:
        """``G |-* t : goal ; D``, searching reducts in ``check_star`` order.

        The candidate sequence of a term does not depend on the goal, so it
        is computed once per (term, fuel) and reused across goals.
        """
        fuel = self.fuel if fuel is None else fuel
        key = (t, fuel)
        hit = self._candidates.get(key)
        if hit is None:
            gen = search_candidates(t, fuel)
            cands = []
            while True:
                try:
                    cands.append(next(gen))
                except StopIteration as stop:
                    exhausted = bool(stop.value)
                    break
            if len(self._candidates) > 100_000:
                self._candidates.clear()
            hit = self._candidates[key] = (tuple(cands), exhausted)
        cands, exhausted = hit
        for n, s in enumerate(cands, 1):
            if self.typed(s, goal):
                return SearchResult(Answer.YES, s, n)
        return SearchResult(Answer.NO if exhausted else Answer.UNKNOWN, None, len(cands))

    def cvar_index(self, name: str) -> Optional[int]:
        a = self.delta_type(name)
        return None if a is None else self.x_index(a)

    def cvar(self, i: int, k: int) -> str:
        return next(itertools.islice(self.mvars_of_type(self.xs[i]), k, None))

    def spec(self) -> ModelSpec:
        return ModelSpec(
            bottoms=self.bottom,
            cvar_index=self.cvar_index,
            cvar=self.cvar,
            rsets={},
            index_set=frozenset(range(len(self.xs))),
            name="completeness",
        )

    def interpretation(self) -> Interpretation:
        return Interpretation({a: BaseB(i + 1) for i, a in enumerate(self.atom_names)})

    def descriptor_type(self, g: ElementDescriptor) -> Type:
        if isinstance(g, BaseB):
            return self.xs[g.i]
        if isinstance(g, ArrowE):
            return Arrow(self.descriptor_type(g.left), self.descriptor_type(g.right))
        raise ValueError("the completeness model has no R sets")

    def sampler(self, avoid=(), per_type: int = 1):
        """Members of ``I(A)`` to probe arrows with: pool variables declared at ``A``."""
        avoid = set(avoid)

        def sample(g):
            out = []
            for name in self.lvars_of_type(self.descriptor_type(g)):
                if name not in avoid:
                    out.append(LVar(name))
                    if len(out) == per_type:
                        return out
            return out

        return sample

    def to_json(self) -> dict:
        return {
            "model": "completeness",
            "atoms": list(self.atom_names),
            "pools": {"lambda": self.lprefix, "mu": self.mprefix},
            "seeds": {"T1": self.seeds[0], "T2": self.seeds[1]},
            "fuel": self.fuel,
        }

    @classmethod
    def from_json(cls, data) -> "CompletenessModel":
        if isinstance(data, str):
            data = json.loads(data)
        seeds = data.get("seeds", {})
        pools = data.get("pools", {})
        return cls(
            atom_names=tuple(data.get("atoms", ("X1", "X2"))),
            lprefix=pools.get("lambda", "g"),
            mprefix=pools.get("mu", "'d"),
            seed1=seeds.get("T1"),
            seed2=seeds.get("T2"),
            fuel=data.get("fuel", 200),
        )


def build_completeness_model(
    atom_names=("X1", "X2"),
    lprefix: str = "g",
    mprefix: str = "'d",
    seed1: Optional[int] = None,
    seed2: Optional[int] = None,
    avoid=(),
    fuel: int = 200,
):
    """The completeness model, refusing ``avoid`` names that fall in its pools."""
    cm = CompletenessModel(atom_names, lprefix, mprefix, seed1, seed2, fuel)
    cm.check_disjoint(avoid)
    return cm


def membership_completeness(t: Term, a: Type, cm: CompletenessModel, fuel: Optional[int] = None) -> Answer:
    """``t in I(A)``, decided as ``G |-* t : A ; D``."""
    return cm.star(t, a, fuel).answer


def membership_direct(t: Term, a: Type, cm: CompletenessModel, fuel: Optional[int] = None, per_type: int = 1) -> Answer:
    """``t in I(A)`` through orthogonal generators: arrows are probed with pool variables."""
    lv, _ = free_vars(t)
    g = interp_type(cm.interpretation(), a)
    return membership(cm.spec(), g, t, cm.fuel if fuel is None else fuel, cm.sampler(lv, per_type))


def general_membership(t: Term, a: Type, fuel: int = 200) -> SearchResult:
    """``t in |A|``: some reduct of ``t`` is closed and typable at ``A``."""

    def ok(s: Term) -> bool:
        return is_closed(s) and typable_at({}, {}, s, a)

    return search_reducts(t, ok, fuel)
