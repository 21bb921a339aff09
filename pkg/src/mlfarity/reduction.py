"""One-step reduction, normalisation and reduction-graph exploration.

Redexes:

    (\\x:K.M) N        -->beta   [N/x]M
    ((x:K1)K2) N      -->beta2  [N/x]K2
    \\x:K.M x          -->eta    M          (x not free in M)
    c p1 ... pn       -->r      rhs        (signature rule r)

Redexes are listed in pre-order (outermost first, annotation before body);
at a single position eta is tried before beta, beta2 and signature rules.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .arity import infer_arity
from .signatures import RewriteRule, Signature
from .syntax import (
    App, Const, Expr, KApp, Lam, Pi, Position, children, has_loose, instantiate,
    replace_at, shift, spine, subterm_at, Bound, with_child, binds,
)


@dataclass(frozen=True, order=True)
class RuleTag:
    name: str

    def __str__(self):
        return self.name

    @property
    def rule_name(self) -> str | None:
        return self.name[4:] if self.name.startswith("sig:") else None


BETA = RuleTag("beta")
BETA2 = RuleTag("beta2")
ETA = RuleTag("eta")


def Sig(name: str) -> RuleTag:
    return RuleTag(f"sig:{name}")


class NotARedex(ValueError):
    pass


class FuelExhausted(RuntimeError):
    def __init__(self, message: str, trace: "ReductionTrace | None" = None):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class RuleSet:
    """Enabled reduction rules.  All rules of `sig` are active."""
    beta: bool = True
    beta2: bool = True
    eta: bool = True
    sig: Signature = field(default_factory=Signature)

    @classmethod
    def parse(cls, text: str, sig: Signature) -> "RuleSet":
        """From text like `beta,eta,sig:pi1`; bare `sig` enables every
        signature rule, `all` everything."""
        names = {s.strip() for s in text.split(",") if s.strip()}
        if "all" in names:
            return cls(sig=sig)
        wanted = set()
        for n in names:
            if n == "sig":
                wanted |= {r.name for r in sig.rules}
            elif n.startswith("sig:"):
                sig.rule(n[4:])
                wanted.add(n[4:])
            elif n not in ("beta", "beta2", "eta"):
                raise ValueError(f"unknown rule {n!r}")
        return cls("beta" in names, "beta2" in names, "eta" in names, sig.with_rules(wanted))

    @property
    def tags(self) -> list[RuleTag]:
        out = [t for t, on in ((BETA, self.beta), (BETA2, self.beta2), (ETA, self.eta)) if on]
        return out + [Sig(r.name) for r in self.sig.rules]

    def only(self, *tags: RuleTag) -> "RuleSet":
        names = {t.rule_name for t in tags if t.rule_name}
        return RuleSet(BETA in tags, BETA2 in tags, ETA in tags, self.sig.with_rules(names))

    def __str__(self):
        return ",".join(str(t) for t in self.tags)


# -- contraction -----------------------------------------------------------

def _eta_body(e: Expr):
    if isinstance(e, Lam) and isinstance(e.body, App):
        f, a = e.body.fun, e.body.arg
        if a == Bound(0) and not has_loose(f, 0):
            return f
    return None


def _tags_at(e: Expr, rules: RuleSet) -> list[tuple[RuleTag, Expr]]:
    """Every (tag, contractum) for a redex rooted exactly at `e`."""
    out = []
    if isinstance(e, Lam):
        if rules.eta:
            f = _eta_body(e)
            if f is not None:
                out.append((ETA, shift(f, -1)))
    elif isinstance(e, App):
        if rules.beta and isinstance(e.fun, Lam):
            out.append((BETA, instantiate(e.fun.body, e.arg)))
    elif isinstance(e, KApp):
        if rules.beta2 and isinstance(e.kind, Pi):
            out.append((BETA2, instantiate(e.kind.cod, e.arg)))
    if rules.sig.rules and isinstance(e, (App, Const)):
        head = spine(e)[0]
        if isinstance(head, Const):
            for r in rules.sig.rules_by_head.get(head.name, ()):
                c = r.contract(e)
                if c is not None:
                    out.append((Sig(r.name), c))
    return out


def contract(e: Expr, tag: RuleTag, rules: RuleSet | None = None) -> Expr:
    rules = rules or RuleSet()
    for t, c in _tags_at(e, rules):
        if t == tag:
            return c
    raise NotARedex(f"no {tag} redex here")


def redexes(subject: Expr, rules: RuleSet) -> list[tuple[Position, RuleTag]]:
    out = []

    def go(e, pos):
        for tag, _ in _tags_at(e, rules):
            out.append((pos, tag))
        for i, c in enumerate(children(e)):
            go(c, pos + (i,))

    go(subject, ())
    return out


def step(subject: Expr, pos: Position, tag: RuleTag, rules: RuleSet | None = None) -> Expr:
    """Contract the `tag` redex at `pos`."""
    rules = rules or RuleSet()
    if tag.rule_name and tag not in rules.tags:
        raise NotARedex(f"rule {tag} is not enabled")
    return replace_at(subject, pos, contract(subterm_at(subject, pos), tag, rules))


def successors(subject: Expr, rules: RuleSet) -> list[tuple[Position, RuleTag, Expr]]:
    """All one-step reducts with the redex that produced each."""
    out = []

    def go(e, pos, rebuild):
        for tag, c in _tags_at(e, rules):
            out.append((pos, tag, rebuild(c)))
        for i, ch in enumerate(children(e)):
            go(ch, pos + (i,), lambda new, e=e, i=i, rebuild=rebuild: rebuild(with_child(e, i, new)))

    go(subject, (), lambda new: new)
    return out


def reducts(subject: Expr, rules: RuleSet) -> set[Expr]:
    return {t for _, _, t in successors(subject, rules)}


def _first_redex(e: Expr, rules: RuleSet, innermost: bool, pos=()):
    if not innermost:
        here = _tags_at(e, rules)
        if here:
            return pos, here[0][0], here[0][1]
    for i, c in enumerate(children(e)):
        found = _first_redex(c, rules, innermost, pos + (i,))
        if found:
            return found
    if innermost:
        here = _tags_at(e, rules)
        if here:
            return pos, here[0][0], here[0][1]
    return None


# -- traces ----------------------------------------------------------------

@dataclass(frozen=True)
class Step:
    position: Position
    tag: RuleTag
    result: Expr


@dataclass(frozen=True)
class ReductionTrace:
    start: Expr
    steps: tuple[Step, ...] = ()

    @property
    def final(self) -> Expr:
        return self.steps[-1].result if self.steps else self.start

    def lines(self) -> list[str]:
        from .surface import show
        return [f"step {n}: {s.tag} at {list(s.position)} => {show(s.result)}"
                for n, s in enumerate(self.steps, 1)]

    def to_json(self) -> dict:
        from .surface import show
        return {
            "start": show(self.start),
            "steps": [{"rule": str(s.tag), "position": list(s.position), "result": show(s.result)}
                      for s in self.steps],
            "normalForm": show(self.final),
            "stats": {"steps": len(self.steps)},
        }

    def replay(self, rules: RuleSet) -> Expr:
        e = self.start
        for s in self.steps:
            e = step(e, s.position, s.tag, rules)
            if e != s.result:
                raise AssertionError(f"trace diverges at {s}")
        return e


STRATEGIES = ("outermost", "innermost")


def normalize(subject: Expr, rules: RuleSet | None = None, strategy: str = "outermost",
              fuel: int = 10_000, ctx=None) -> tuple[Expr, ReductionTrace]:
    """Reduce to normal form with leftmost-outermost (or -innermost) steps.

    With `ctx` the subject is first required to have a correct arity, which
    guarantees termination.
    """
    rules = rules or RuleSet()
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if ctx is not None:
        infer_arity(ctx, subject, rules.sig)
    steps = []
    e = subject
    while True:
        found = _first_redex(e, rules, strategy == "innermost")
        if found is None:
            return e, ReductionTrace(subject, tuple(steps))
        if len(steps) >= fuel:
            raise FuelExhausted(f"no normal form within {fuel} steps",
                                ReductionTrace(subject, tuple(steps)))
        pos, tag, c = found
        e = replace_at(e, pos, c)
        steps.append(Step(pos, tag, e))


def nf(subject: Expr, rules: RuleSet | None = None, fuel: int = 10_000) -> Expr:
    return normalize(subject, rules, fuel=fuel)[0]


def is_normal(subject: Expr, rules: RuleSet) -> bool:
    return _first_redex(subject, rules, False) is None


# -- exhaustive exploration ------------------------------------------------

@dataclass(frozen=True)
class SnReport:
    nodes: int
    edges: int
    longest_path: int
    normal_forms: tuple[Expr, ...]
    fuel_exhausted: bool
    cyclic: bool = False
    frontier: int = 0

    @property
    def terminating(self) -> bool:
        return not self.fuel_exhausted

    def to_json(self) -> dict:
        from .surface import show
        return {
            "nodes": self.nodes,
            "edges": self.edges,
            "longestPath": self.longest_path,
            "normalForms": [show(t) for t in self.normal_forms],
            "fuelExhausted": self.fuel_exhausted,
            "cyclic": self.cyclic,
            "frontier": self.frontier,
        }


def sn_explore(subject: Expr, rules: RuleSet | None = None, fuel: int = 100_000) -> SnReport:
    """Breadth-first exploration of the reduction graph of `subject`.

    Nodes are alpha-classes.  The exploration stops once more than `fuel`
    nodes would be needed.  A cycle means an infinite reduction sequence,
    which is reported as exhausting every fuel.
    """
    rules = rules or RuleSet()
    index = {subject: 0}
    order = [subject]
    level = [0]
    succ: dict[int, list[int]] = {}
    queue = deque([0])
    exhausted = False
    while queue and not exhausted:
        n = queue[0]
        outs = set()
        # position order, not set order, so node numbering is reproducible
        for t in dict.fromkeys(t for _, _, t in successors(order[n], rules)):
            m = index.get(t)
            if m is None:
                if len(order) >= fuel:
                    exhausted = True
                    break
                m = index[t] = len(order)
                order.append(t)
                level.append(level[n] + 1)
                queue.append(m)
            outs.add(m)
        if not exhausted:
            queue.popleft()
            succ[n] = sorted(outs)

    graph = [succ.get(i, []) for i in range(len(order))]
    cyclic = _has_cycle(graph)
    normal = tuple(order[i] for i in sorted(succ) if not succ[i])
    if cyclic or exhausted:
        longest = max(level)
    else:
        longest = _longest_path(graph)
    return SnReport(
        nodes=len(order),
        edges=sum(len(v) for v in succ.values()),
        longest_path=longest,
        normal_forms=normal,
        fuel_exhausted=exhausted or cyclic,
        cyclic=cyclic,
        frontier=len(queue),
    )


def _has_cycle(succ: list[list[int]]) -> bool:
    WHITE, GREY, BLACK = 0, 1, 2
    colour = [WHITE] * len(succ)
    for root in range(len(succ)):
        if colour[root] != WHITE:
            continue
        stack = [(root, iter(succ[root]))]
        colour[root] = GREY
        while stack:
            v, it = stack[-1]
            for w in it:
                if colour[w] == GREY:
                    return True
                if colour[w] == WHITE:
                    colour[w] = GREY
                    stack.append((w, iter(succ[w])))
                    break
            else:
                colour[v] = BLACK
                stack.pop()
    return False


def _longest_path(succ: list[list[int]]) -> int:
    """Longest path from node 0 in an acyclic graph."""
    best: dict[int, int] = {}
    stack = [(0, False)]
    while stack:
        v, done = stack.pop()
        if done:
            best[v] = 1 + max((best[w] for w in succ[v]), default=-1)
            continue
        if v in best:
            continue
        stack.append((v, True))
        stack.extend((w, False) for w in succ[v] if w not in best)
    return best[0]
