"""Term generators.

`Grammar` counts every correct-arity expression by sort, exact size,
arities of the enclosing binders and arity, which gives uniform sampling by
unranking and exhaustive enumeration from the same table.  `plant` splices
a fresh redex of a chosen rule into a host term, and `WellTypedGen` builds
MLF-well-typed terms goal-first against a typing context.

Size counts nodes: atoms and `Type` are 1, every other constructor is one
plus the sizes of its children.
"""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Mapping

from .arity import ArityJudgement, infer_arity
from .reduction import BETA, BETA2, ETA, RuleSet, RuleTag
from .signatures import Signature
from .syntax import (
    ZERO, App, Arity, ArityContext, Bound, Const, El, Expr, KApp, Kind, Lam,
    Pair, Pi, Position, Term, Type, Var, apps, children, close, fv, instantiate,
    is_kind, is_term, replace_at, shift, subst_many,
)

SORTS = ("term", "kind", "any")
_HINTS = "xyzwuv"


class Unsatisfiable(ValueError):
    pass


# -- valuations ------------------------------------------------------------

@dataclass(frozen=True)
class Valuation:
    """A map from variables to terms, the identity outside its domain."""
    mapping: Mapping[str, Term] = field(default_factory=dict)

    def __call__(self, name: str) -> Term:
        return self.mapping.get(name, Var(name))


def apply_valuation(rho: Valuation, subject: Expr) -> Expr:
    """Replace every free variable `x` by `rho(x)` simultaneously."""
    return subst_many(subject, dict(rho.mapping))


# -- counting grammar ------------------------------------------------------

@dataclass(frozen=True)
class GenConfig:
    size: int
    seed: int = 0
    ctx: ArityContext = field(default_factory=ArityContext)
    target: Arity | None = None
    sort: str = "term"
    sig: Signature = field(default_factory=Signature)
    rules: RuleSet | None = None

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("size must be at least 1")
        if self.sort not in SORTS:
            raise ValueError(f"sort must be one of {SORTS}")


Local = tuple[Arity, ...]


class Grammar:
    """Counts and unranks correct-arity expressions over `ctx` and `sig`."""

    def __init__(self, ctx: ArityContext, sig: Signature | None = None):
        self.ctx = ctx
        self.sig = sig or Signature()
        self.atoms = [(Var(x), a) for x, a in ctx.entries]
        self.atoms += [(Const(c), a) for c, a in sorted(self.sig.arities.items())]
        self.table = lru_cache(maxsize=None)(self._table)
        self.items = lru_cache(maxsize=None)(self._items)
        self._weights = lru_cache(maxsize=None)(self._weights_uncached)

    # table(sort, size, local) -> Counter{arity: count}

    def _table(self, sort: str, size: int, local: Local) -> Counter:
        out: Counter = Counter()
        for count, arity, _ in self._choices(sort, size, local, None):
            out[arity] += count
        return out

    def _items(self, sort: str, size: int, local: Local) -> list:
        return sorted(self.table(sort, size, local).items(), key=lambda kv: _akey(kv[0]))

    def count(self, sort: str, size: int, arity: Arity | None = None, local: Local = ()) -> int:
        sorts = ("term", "kind") if sort == "any" else (sort,)
        total = 0
        for s in sorts:
            t = self.table(s, size, local)
            total += sum(t.values()) if arity is None else t.get(arity, 0)
        return total

    def _choices(self, sort, size, local, target):
        """Yield (count, arity, recipe) for each constructor choice."""
        ok = (lambda a: True) if target is None else (lambda a: a == target)
        if size == 1:
            if sort == "term":
                for i, a in enumerate(local):
                    if ok(a):
                        yield 1, a, ("leaf", Bound(i))
                for t, a in self.atoms:
                    if ok(a):
                        yield 1, a, ("leaf", t)
            elif ok(ZERO):
                yield 1, ZERO, ("leaf", Type())
            return
        if sort == "kind" and size >= 2 and ok(ZERO):
            n = self.table("term", size - 1, local).get(ZERO, 0)
            if n:
                yield n, ZERO, ("El",)
        binder = Lam if sort == "term" else Pi
        head = App if sort == "term" else KApp
        for s1 in range(1, size - 1):
            s2 = size - 1 - s1
            for a1, n1 in self.items("kind", s1, local):
                if target is not None and (not isinstance(target, Pair) or target.left != a1):
                    continue
                for a2, n2 in self.items(sort, s2, (a1,) + local):
                    if ok(Pair(a1, a2)):
                        yield n1 * n2, Pair(a1, a2), (binder, s1, a1, s2, a2)
        for s1 in range(1, size - 1):
            s2 = size - 1 - s1
            args = self.table("term", s2, local)
            for fa, n1 in self.items(sort, s1, local):
                if isinstance(fa, Pair) and ok(fa.right):
                    n2 = args.get(fa.left, 0)
                    if n2:
                        yield n1 * n2, fa.right, (head, s1, fa, s2, fa.left)

    def unrank(self, sort: str, size: int, arity: Arity, rank: int, local: Local = ()) -> Expr:
        for count, _, recipe in self._choices(sort, size, local, arity):
            if rank < count:
                return self._make(recipe, sort, size, local, rank)
            rank -= count
        raise IndexError("rank out of range")

    def _make(self, recipe, sort, size, local, rank):
        kind = recipe[0]
        if kind == "leaf":
            return recipe[1]
        if kind == "El":
            return El(self.unrank("term", size - 1, ZERO, rank, local))
        ctor, s1, a1, s2, a2 = recipe
        if ctor in (Lam, Pi):
            n2 = self.table(sort, s2, (a1,) + local)[a2]
            r1, r2 = divmod(rank, n2)
            k = self.unrank("kind", s1, a1, r1, local)
            b = self.unrank(sort, s2, a2, r2, (a1,) + local)
            return ctor(k, b, _HINTS[len(local) % len(_HINTS)])
        n2 = self.table("term", s2, local)[a2]
        r1, r2 = divmod(rank, n2)
        return ctor(self.unrank(sort, s1, a1, r1, local), self.unrank("term", s2, a2, r2, local))

    def enumerate(self, sort: str, size: int, arity: Arity | None = None,
                  local: Local = ()) -> Iterator[tuple[Expr, Arity]]:
        """Every expression of exactly `size` (and `arity` if given)."""
        sorts = ("term", "kind") if sort == "any" else (sort,)
        for s in sorts:
            table = self.table(s, size, local)
            arities = sorted(table, key=_akey) if arity is None else [arity]
            for a in arities:
                for r in range(table.get(a, 0)):
                    yield self.unrank(s, size, a, r, local), a

    def _weights_uncached(self, sort, arity, max_size, local, min_size):
        sorts = ("term", "kind") if sort == "any" else (sort,)
        weights = []
        for s in sorts:
            for n in range(min_size, max_size + 1):
                for a, c in self.items(s, n, local):
                    if arity is None or a == arity:
                        weights.append((c, s, n, a))
        return weights, sum(w[0] for w in weights)

    def sample(self, rng: random.Random, sort: str, arity: Arity | None, max_size: int,
               local: Local = (), min_size: int = 1) -> Expr:
        """Uniform over all expressions with size in [min_size, max_size]."""
        weights, total = self._weights(sort, arity, max_size, local, min_size)
        if total == 0:
            raise Unsatisfiable(f"no {sort} of arity {arity} with size <= {max_size}")
        r = rng.randrange(total)
        for c, s, n, a in weights:
            if r < c:
                return self.unrank(s, n, a, r, local)
            r -= c
        raise AssertionError("unreachable")


@lru_cache(maxsize=None)
def _akey(a: Arity) -> str:
    return str(a)


_GRAMMARS: dict = {}


def grammar_for(ctx: ArityContext, sig: Signature | None = None) -> Grammar:
    """A cached grammar; tables are reused across calls with the same
    context and signature object."""
    sig = sig or _EMPTY
    hit = _GRAMMARS.get((ctx, id(sig)))
    if hit is None or hit.sig is not sig:
        hit = _GRAMMARS[(ctx, id(sig))] = Grammar(ctx, sig)
    return hit


_EMPTY = Signature()


def gen_term(cfg: GenConfig) -> tuple[Expr, ArityJudgement]:
    """A uniformly chosen expression of size <= cfg.size with a certificate."""
    g = grammar_for(cfg.ctx, cfg.sig)
    rng = random.Random(cfg.seed)
    e = g.sample(rng, cfg.sort, cfg.target, cfg.size)
    a = infer_arity(cfg.ctx, e, cfg.sig)
    return e, ArityJudgement(cfg.ctx, e, a)


# -- redex planting --------------------------------------------------------

def sites(ctx: ArityContext, e: Expr, sig=None, local: Local = ()) -> list[tuple[Position, Local, Arity, str]]:
    """(position, binder arities, arity, sort) for every subexpression."""
    out = []

    def go(x, pos, loc):
        a = infer_arity(ctx, x, sig, loc)
        out.append((pos, loc, a, "term" if is_term(x) else "kind"))
        match x:
            case Lam(k, b) | Pi(k, b):
                go(k, pos + (0,), loc)
                go(b, pos + (1,), (infer_arity(ctx, k, sig, loc),) + loc)
            case _:
                for i, c in enumerate(children(x)):
                    go(c, pos + (i,), loc)

    go(e, (), tuple(local))
    return out


def _piece(g: Grammar, rng, sort, arity, local, max_size=4):
    return g.sample(rng, sort, arity, max_size, local)


def make_redex(g: Grammar, rng: random.Random, tag: RuleTag, arity: Arity, local: Local,
               sort: str = "term", piece_size: int = 4) -> Expr:
    """A fresh `tag` redex of the given arity under binders `local`."""
    if tag == BETA and sort == "term" or tag == BETA2 and sort == "kind":
        k = _piece(g, rng, "kind", None, local, 3)
        b = infer_arity(g.ctx, k, g.sig, local)
        body = _piece(g, rng, sort, arity, (b,) + local, piece_size)
        arg = _piece(g, rng, "term", b, local, piece_size)
        binder = Lam if sort == "term" else Pi
        ctor = App if sort == "term" else KApp
        return ctor(binder(k, body, "r"), arg)
    if tag == ETA and sort == "term":
        if not isinstance(arity, Pair):
            raise Unsatisfiable("eta redex needs a product arity")
        k = _piece(g, rng, "kind", arity.left, local, 3)
        f = _piece(g, rng, "term", arity, local, piece_size)
        return Lam(k, App(shift(f, 1), Bound(0)), "e")
    name = tag.rule_name
    if name and sort == "term":
        rule = g.sig.rule(name)
        if rule.arity != arity:
            raise Unsatisfiable(f"rule {name} has arity {rule.arity}")
        binding = {x: _piece(g, rng, "term", a, local, max(1, piece_size - 1))
                   for x, a in rule.context.entries}
        return subst_many(rule.lhs, binding)
    raise Unsatisfiable(f"no {tag} redex of sort {sort}")


def plant(g: Grammar, rng: random.Random, host: Expr, tag: RuleTag,
          piece_size: int = 4, local: Local = ()) -> tuple[Expr, Position]:
    """Replace a random subexpression of `host` by a fresh `tag` redex of the
    same arity.  Returns the new expression and the redex position."""
    spots = sites(g.ctx, host, g.sig, local)
    rng.shuffle(spots)
    for pos, local, a, sort in spots:
        try:
            r = make_redex(g, rng, tag, a, local, sort, piece_size)
        except Unsatisfiable:
            continue
        return replace_at(host, pos, r), pos
    raise Unsatisfiable(f"nowhere to plant a {tag} redex")


# -- well-typed generation -------------------------------------------------

class WellTypedGen:
    """Goal-directed generation of MLF-well-typed terms.

    A goal kind is met by a lambda (for products) or by applying a head
    from the context, the locals or the signature to generated arguments
    until the result converts to the goal.  Every output is rechecked by
    `infer_type` before it is returned.
    """

    def __init__(self, gamma, rng: random.Random, depth: int = 3, tries: int = 6):
        self.gamma = gamma
        self.rng = rng
        self.depth = depth
        self.tries = tries
        self.check = gamma.checker()
        self.env0 = gamma.env()
        sig = gamma.sig
        self.consts = [(Const(c), self.check.nf(k)) for c, k in sorted(sig.kinds.items())]
        self._n = 0

    def heads(self, env: dict) -> list[tuple[Term, Kind]]:
        return [(Var(x), k) for x, k in env.items()] + self.consts

    def fresh(self) -> str:
        self._n += 1
        return f"v{self._n}"

    def of_kind(self, env: dict, goal: Kind, depth: int) -> Term | None:
        if isinstance(goal, Pi) and (depth <= 0 or self.rng.random() < 0.5):
            x = self.fresh()
            body = self.of_kind({**env, x: goal.dom}, self.check.nf(instantiate(goal.cod, Var(x))), depth - 1)
            if body is not None:
                return Lam(goal.dom, close(body, x), goal.hint)
            return None
        hs = self.heads(env)
        self.rng.shuffle(hs)
        fits = [h for h in hs if self._may_reach(h[1], goal)]
        for h, k in fits[: self.tries]:
            t = self._apply(env, h, k, goal, depth)
            if t is not None:
                return t
        if isinstance(goal, Pi):
            x = self.fresh()
            body = self.of_kind({**env, x: goal.dom}, self.check.nf(instantiate(goal.cod, Var(x))), depth - 1)
            if body is not None:
                return Lam(goal.dom, close(body, x), goal.hint)
        return None

    @staticmethod
    def _may_reach(k: Kind, goal: Kind) -> bool:
        """Cheap filter: after some arguments the shape must match."""
        while True:
            if type(k) is type(goal):
                return True
            if not isinstance(k, Pi):
                return False
            k = k.cod

    def _apply(self, env, head, k, goal, depth):
        t = head
        while True:
            if self.check.conv(k, goal):
                return t
            if not isinstance(k, Pi) or depth <= 0:
                return None
            arg = self.of_kind(env, k.dom, depth - 1)
            if arg is None:
                return None
            t = App(t, arg)
            k = self.check.nf(instantiate(k.cod, arg))

    def any_term(self, env: dict | None = None, depth: int | None = None) -> tuple[Term, Kind]:
        """A term of whatever kind random application produces."""
        env = self.env0 if env is None else env
        depth = self.depth if depth is None else depth
        hs = self.heads(env)
        h, k = hs[self.rng.randrange(len(hs))]
        t = h
        nargs = self.rng.randrange(0, 5)
        while nargs and isinstance(k, Pi):
            arg = self.of_kind(env, k.dom, depth - 1)
            if arg is None:
                break
            t = App(t, arg)
            k = self.check.nf(instantiate(k.cod, arg))
            nargs -= 1
        if isinstance(k, Pi) and self.rng.random() < 0.3:
            x = self.fresh()
            inner_env = {**env, x: k.dom}
            body = self.of_kind(inner_env, self.check.nf(instantiate(k.cod, Var(x))), depth - 1)
            if body is not None:
                t = Lam(k.dom, close(body, x), k.hint)
        return t, k


def lab_type_context(sig: Signature, active=None):
    """A typing context rich enough that every builtin constant is usable."""
    from .mlf import TypeContext
    from .surface import parse_type_context
    names = sig.names()
    lines = [
        "assume A : Type;",
        "assume B : (x:El(A))Type;",
        "assume C : Type;",
        "assume a : El(A);",
        "assume b : El(B a);",
        "assume c : El(C);",
        "assume f : (x:El(A))El(A);",
        "assume g : (x:El(A))El(B x);",
        "assume h : (x:El(C))El(C);",
        "assume k : (F:(x:El(A))El(A))El(C);",
        "assume z : El(Sigma A B);",
    ]
    if "Bool" in names and "E_Bool" in names:
        lines += [
            "assume P : (x:El(Bool))Type;",
            "assume p1 : El(P true);",
            "assume p2 : El(P false);",
            "assume t : El(Bool);",
        ]
    if "U" in names:
        lines += ["assume w : El(U);", "assume d : El(uo w);"]
    if "Sigma" not in names:
        lines = [l for l in lines if "Sigma" not in l]
    return TypeContext(tuple(parse_type_context("\n".join(lines), names)), sig, active)


def well_typed_corpus(gamma, n: int, seed: int, depth: int = 3) -> list[tuple[Term, Kind]]:
    """`n` distinct well-typed terms; each is rechecked with `infer_type`."""
    from .mlf import TypingError, infer_type
    rng = random.Random(seed)
    gen = WellTypedGen(gamma, rng, depth)
    out: dict[Term, Kind] = {}
    attempts = 0
    while len(out) < n:
        attempts += 1
        if attempts > 50 * n:
            raise Unsatisfiable(f"only {len(out)} well-typed terms after {attempts} attempts")
        t, _ = gen.any_term()
        if t in out:
            continue
        try:
            out[t] = infer_type(gamma, t).kind
        except TypingError:
            continue
    return list(out.items())
