"""Executable checks of the lemmas behind strong normalisation.

Each `check_*` function examines one instance and returns a `Verdict`:
passed, skipped (precondition not met), failed (with an explanation) or
bound (the witness search gave up; this is not a refutation).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .arity import NoArity, enumerate_derivations, infer_arity
from .reduction import BETA, ETA, RuleSet, RuleTag, successors
from .syntax import App, ArityContext, Bound, Expr, Lam, fv, has_loose, shift, size, subst

PASS, SKIP, FAIL, BOUND = "pass", "skip", "fail", "bound"


class SearchBoundExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Verdict:
    status: str
    explanation: str = ""

    @property
    def ok(self) -> bool:
        return self.status in (PASS, SKIP)


def _pass():
    return Verdict(PASS)


def _skip(why):
    return Verdict(SKIP, why)


def _fail(why):
    return Verdict(FAIL, why)


@dataclass(frozen=True)
class LemmaVerdict:
    """Aggregate over many cases; `counterexamples` hold (case, inputs, why)."""
    lemma: str
    cases: int
    passed: int
    skipped: int
    bound_exceeded: int
    counterexamples: tuple = field(default=())

    @property
    def ok(self) -> bool:
        return not self.counterexamples and not self.bound_exceeded


def only(rules: RuleSet, tag: RuleTag) -> RuleSet:
    return rules.only(tag)


def steps_to(src: Expr, dst: Expr, rules: RuleSet) -> list:
    """Positions of one-step `rules` reductions from `src` landing on `dst`."""
    return [pos for pos, _, t in successors(src, rules) if t == dst]


def reachable(src: Expr, dst: Expr, rules: RuleSet, limit: int = 20_000) -> bool:
    """Whether `src` reduces to `dst` in zero or more steps.

    Only used with size-decreasing rule sets (eta, signature rules), so the
    search space is finite; nodes smaller than `dst` are pruned.
    """
    if src == dst:
        return True
    floor = size(dst)
    seen = {src}
    queue = deque([src])
    while queue:
        e = queue.popleft()
        for _, _, t in successors(e, rules):
            if t == dst:
                return True
            if t not in seen and size(t) >= floor:
                if len(seen) >= limit:
                    raise SearchBoundExceeded(f"more than {limit} terms explored")
                seen.add(t)
                queue.append(t)
    return False


# -- substitution ----------------------------------------------------------

def check_subst(tag: RuleTag, rules: RuleSet, m1: Expr, m2: Expr, n: Expr, x: str) -> Verdict:
    """First clause: m1 -> m2 gives [n/x]m1 -> [n/x]m2 in one `tag` step."""
    r = only(rules, tag)
    if not steps_to(m1, m2, r):
        return _skip(f"premise: no {tag} step from m1 to m2")
    lhs, rhs = subst(m1, x, n), subst(m2, x, n)
    if steps_to(lhs, rhs, r):
        return _pass()
    return _fail(f"[n/{x}]m1 does not {tag}-reduce to [n/{x}]m2 in one step")


def check_subst_arg(tag: RuleTag, rules: RuleSet, m: Expr, n1: Expr, n2: Expr, x: str) -> Verdict:
    """Second clause: n1 -> n2 gives [n1/x]m ->> [n2/x]m by `tag` steps."""
    r = only(rules, tag)
    if not steps_to(n1, n2, r):
        return _skip(f"premise: no {tag} step from n1 to n2")
    try:
        ok = reachable(subst(m, x, n1), subst(m, x, n2), r)
    except SearchBoundExceeded as exc:
        return Verdict(BOUND, str(exc))
    return _pass() if ok else _fail(f"[n2/{x}]m unreachable from [n1/{x}]m by {tag}")


def check_subst_eta(m1, m2, n, x, rules: RuleSet | None = None) -> Verdict:
    return check_subst(ETA, rules or RuleSet(), m1, m2, n, x)


def check_subst_pi1(m1, m2, n, x, rules: RuleSet) -> Verdict:
    from .reduction import Sig
    return check_subst(Sig("pi1"), rules, m1, m2, n, x)


# -- free variables --------------------------------------------------------

def check_fv_beta(m1: Expr, m2: Expr, x: str, rules: RuleSet | None = None) -> Verdict:
    r = only(rules or RuleSet(), BETA)
    if not steps_to(m1, m2, r):
        return _skip("premise: m1 does not beta-reduce to m2")
    if x in fv(m1):
        return _skip(f"{x} is free in m1")
    return _fail(f"{x} appears free after a beta step") if x in fv(m2) else _pass()


# -- case analyses ---------------------------------------------------------

def check_eta_case(m1: Expr, target: Expr, rules: RuleSet | None = None) -> Verdict:
    """m1 ->eta target, target a lambda: each such step is exactly one of
    an eta step at the root that exposes the target, a step in the body
    under the same annotation, or a step in the annotation."""
    return _case(ETA, rules or RuleSet(), m1, target, allow_root=True)


def check_pi1_case(m1: Expr, target: Expr, rules: RuleSet, tag: RuleTag | None = None) -> Verdict:
    """m1 ->r target, target a lambda, r a signature rule: the step is in
    the body or in the annotation, never at the root."""
    from .reduction import Sig
    return _case(tag or Sig("pi1"), rules, m1, target, allow_root=False)


def _case(tag, rules, m1, target, allow_root) -> Verdict:
    if not isinstance(target, Lam):
        return _skip("target is not an abstraction")
    r = only(rules, tag)
    positions = steps_to(m1, target, r)
    if not positions:
        return _skip(f"premise: no {tag} step from m1 to the target")
    for pos in positions:
        shapes = []
        if allow_root and pos == () and _root_shape(m1, target):
            shapes.append("root")
        if pos[:1] == (1,) and isinstance(m1, Lam) and m1.kind == target.kind \
                and steps_to(m1.body, target.body, r):
            shapes.append("body")
        if pos[:1] == (0,) and isinstance(m1, Lam) and m1.body == target.body \
                and steps_to(m1.kind, target.kind, r):
            shapes.append("annotation")
        if len(shapes) != 1:
            found = ", ".join(shapes) or "none"
            return _fail(f"step at {list(pos)} matches {found} of the listed shapes")
    return _pass()


def _root_shape(m1, target) -> bool:
    # m1 is \y:K1.(target y) with y not free in target
    return (isinstance(m1, Lam) and isinstance(m1.body, App) and m1.body.arg == Bound(0)
            and not has_loose(m1.body.fun, 0) and shift(m1.body.fun, -1) == target)


# -- commutation -----------------------------------------------------------

def check_commutation(m1: Expr, tag: RuleTag, m2: Expr, m3: Expr, rules: RuleSet,
                      node_limit: int = 5_000) -> Verdict:
    """m1 ->tag m2 ->beta m3.  For eta look for m1 ->>beta+ m2' ->>eta m3
    within 2*size(m1) beta steps; for a signature rule require exactly one
    beta step m1 -> m2' with m2' ->>tag m3."""
    rt, rb = only(rules, tag), only(rules, BETA)
    if not steps_to(m1, m2, rt):
        return _skip(f"premise: no {tag} step from m1 to m2")
    if not steps_to(m2, m3, rb):
        return _skip("premise: no beta step from m2 to m3")
    if tag.rule_name:
        try:
            if any(reachable(t, m3, rt) for _, _, t in successors(m1, rb)):
                return _pass()
        except SearchBoundExceeded as exc:
            return Verdict(BOUND, str(exc))
        return _fail(f"no m2' with m1 ->beta m2' in one step and m2' ->>{tag} m3")
    bound = 2 * size(m1)
    try:
        found = _beta_witness(m1, m3, rb, rt, bound, node_limit)
    except SearchBoundExceeded as exc:
        return Verdict(BOUND, str(exc))
    if found is None:
        return Verdict(BOUND, f"no witness within {bound} beta steps")
    return _pass() if found else _fail(f"no m2' with m1 ->>beta+ m2' and m2' ->>{tag} m3")


def _beta_witness(m1, m3, rb, rt, bound, node_limit):
    """Breadth-first over beta reducts of m1 at distance 1..bound.  True
    if one reaches m3 by `rt`; False once the reducts run out; None if
    the bound cut the search short."""
    seen = {m1}
    level = [m1]
    for _ in range(bound):
        nxt = []
        for e in level:
            for _, _, t in successors(e, rb):
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        if len(seen) > node_limit:
            raise SearchBoundExceeded(f"more than {node_limit} beta reducts")
        if any(reachable(t, m3, rt) for t in nxt):
            return True
        if not nxt:
            return False
        level = nxt
    return None


# -- arity properties ------------------------------------------------------

def check_subject_reduction(ctx: ArityContext, m: Expr, rules: RuleSet) -> Verdict:
    try:
        a = infer_arity(ctx, m, rules.sig)
    except NoArity:
        return _skip("subject has no arity")
    for pos, tag, t in successors(m, rules):
        try:
            b = infer_arity(ctx, t, rules.sig)
        except NoArity as exc:
            return _fail(f"{tag} step at {list(pos)} loses the arity: {exc.reason}")
        if a != b:
            return _fail(f"{tag} step at {list(pos)} changes arity {a} to {b}")
    return _pass()


def check_uniqueness(ctx: ArityContext, m: Expr, sig=None) -> Verdict:
    """Exhaustive derivation search finds exactly one derivation."""
    derivs = enumerate_derivations(ctx, m, size(m) + 1, sig)
    arities = {d.conclusion.arity for d in derivs}
    try:
        a = infer_arity(ctx, m, sig)
    except NoArity:
        return _pass() if not derivs else _fail(f"checker rejects but search derives {arities}")
    if arities != {a}:
        return _fail(f"derivable arities {sorted(map(str, arities))}, checker says {a}")
    if len(derivs) != 1:
        return _fail(f"{len(derivs)} distinct derivations")
    return _pass()


# -- interpretation of arities (diagnostic) --------------------------------

@dataclass(frozen=True)
class InterpVerdict:
    """Outcome of a sampled membership test.  `member=False` comes with the
    arguments under which the applied subject was seen to diverge; `True`
    only means no divergence was found among the samples."""
    member: bool
    samples: int
    witness: tuple = ()


def bounded_interp_member(m: Expr, a, budget: int = 20, seed: int = 0,
                          rules: RuleSet | None = None, ctx: ArityContext | None = None,
                          fuel: int = 10_000) -> InterpVerdict:
    """Necessary condition for membership of `m` in the interpretation of `a`.

    At arity 0 the subject must be strongly normalising (checked by graph
    exploration).  At (a1,a2) the subject is applied to sampled members of
    the interpretation of a1 and the test recurses at a2.  Samples are a
    fresh variable, generated correct-arity terms of arity a1 and, when a1
    is 0, the subject itself if it normalises.
    """
    import random

    from .generate import Unsatisfiable, grammar_for
    from .reduction import sn_explore
    from .syntax import Pair, Var, Zero

    rules = rules or RuleSet()
    ctx = ctx or ArityContext()
    g = grammar_for(ctx, rules.sig)
    rng = random.Random(seed)
    counter = [0]

    def sn(t) -> bool:
        counter[0] += 1
        return not sn_explore(t, rules, fuel).fuel_exhausted

    def go(t, a, args) -> tuple | None:
        if isinstance(a, Zero):
            return None if sn(t) else args
        samples = [Var(f"v#{len(args)}")]
        if isinstance(a.left, Zero) and sn(m):
            samples.append(m)
        for _ in range(max(0, budget - len(samples))):
            try:
                samples.append(g.sample(rng, "term", a.left, 5))
            except Unsatisfiable:
                break
        for n in dict.fromkeys(samples):
            bad = go(App(t, n), a.right, args + (n,))
            if bad is not None:
                return bad
        return None

    bad = go(m, a, ())
    return InterpVerdict(bad is None, counter[0], bad or ())
