"""Arity inference: which terms and kinds have a correct arity.

`infer_arity` is the syntax-directed checker.  `enumerate_derivations` is an
independent relational search over the same rule set that collects every
derivation of `A |- M : a` for any `a`; it exists to confirm that at most one
arity is derivable for each subject.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .syntax import (
    ZERO, App, Arity, ArityContext, Bound, Const, El, Expr, KApp, Lam, Pair,
    Pi, Position, Type, Var, Zero, is_kind, is_term,
)


class NoArity(Exception):
    """The subject has no correct arity; `position` locates the culprit."""

    def __init__(self, position: Position, reason: str):
        super().__init__(f"at {list(position)}: {reason}")
        self.position = position
        self.reason = reason


def ctx_valid(ctx: ArityContext) -> bool:
    names = ctx.names()
    return len(names) == len(set(names))


def const_arities(sig) -> Mapping[str, Arity]:
    if sig is None:
        return {}
    if isinstance(sig, Mapping):
        return sig
    return sig.arities


def infer_arity(ctx: ArityContext, subject: Expr, sig=None,
                local: Sequence[Arity] = ()) -> Arity:
    """The unique `a` with `ctx |- subject : a`, or raise NoArity.

    `local` gives arities of loose bound indices (innermost first), for
    subjects cut out from under binders.
    """
    if not ctx_valid(ctx):
        raise NoArity((), f"context {ctx} repeats a variable")
    env = dict(ctx.entries)
    return _infer(subject, tuple(local), env, const_arities(sig), ())


def _infer(e, local, env, consts, pos) -> Arity:
    match e:
        case Var(x):
            if x not in env:
                raise NoArity(pos, f"unbound variable {x}")
            return env[x]
        case Bound(i):
            if i >= len(local):
                raise NoArity(pos, f"dangling bound index {i}")
            return local[i]
        case Const(c):
            if c not in consts:
                raise NoArity(pos, f"undeclared constant {c}")
            return consts[c]
        case Type():
            return ZERO
        case El(t):
            if not is_term(t):
                raise NoArity(pos, "El of a non-term is neither a term nor a kind")
            a = _infer(t, local, env, consts, pos + (0,))
            if a != ZERO:
                raise NoArity(pos + (0,), f"El needs arity 0, got {a}")
            return ZERO
        case Lam(k, b) | Pi(k, b):
            body_ok = is_term(b) if isinstance(e, Lam) else is_kind(b)
            if not is_kind(k) or not body_ok:
                raise NoArity(pos, f"malformed {type(e).__name__}")
            a1 = _infer(k, local, env, consts, pos + (0,))
            a2 = _infer(b, (a1,) + local, env, consts, pos + (1,))
            return Pair(a1, a2)
        case App(f, n) | KApp(f, n):
            head_ok = is_term(f) if isinstance(e, App) else is_kind(f)
            if not head_ok or not is_term(n):
                raise NoArity(pos, f"malformed {type(e).__name__}")
            fa = _infer(f, local, env, consts, pos + (0,))
            if not isinstance(fa, Pair):
                raise NoArity(pos + (0,), f"applied subject has arity {fa}")
            na = _infer(n, local, env, consts, pos + (1,))
            if na != fa.left:
                raise NoArity(pos + (1,), f"argument has arity {na}, expected {fa.left}")
            return fa.right
    raise NoArity(pos, f"not a term or kind: {e!r}")


def has_arity(ctx: ArityContext, subject: Expr, sig=None, local=()) -> bool:
    try:
        infer_arity(ctx, subject, sig, local)
        return True
    except NoArity:
        return False


# -- derivations -----------------------------------------------------------

@dataclass(frozen=True)
class ArityJudgement:
    context: ArityContext
    subject: Expr
    arity: Arity
    local: tuple[Arity, ...] = field(default=())


@dataclass(frozen=True)
class Derivation:
    rule: str
    premises: tuple["Derivation", ...]
    conclusion: ArityJudgement

    def height(self) -> int:
        return 1 + max((p.height() for p in self.premises), default=0)


Search = Callable[[ArityContext, tuple, Expr, int], list[Derivation]]


def _r_var(ctx, local, e, consts, depth, search):
    if not isinstance(e, Var) or not ctx_valid(ctx):
        return []
    return [Derivation("var", (), ArityJudgement(ctx, e, a, local))
            for x, a in ctx.entries if x == e.name]


def _r_bound(ctx, local, e, consts, depth, search):
    # the context rule extends A with one entry per enclosing binder
    if not isinstance(e, Bound) or e.index >= len(local) or not ctx_valid(ctx):
        return []
    return [Derivation("var", (), ArityJudgement(ctx, e, local[e.index], local))]


def _r_const(ctx, local, e, consts, depth, search):
    if not isinstance(e, Const) or e.name not in consts:
        return []
    return [Derivation("const", (), ArityJudgement(ctx, e, consts[e.name], local))]


def _r_type(ctx, local, e, consts, depth, search):
    if not isinstance(e, Type) or not ctx_valid(ctx):
        return []
    return [Derivation("Type", (), ArityJudgement(ctx, e, ZERO, local))]


def _r_el(ctx, local, e, consts, depth, search):
    if not isinstance(e, El) or not is_term(e.term):
        return []
    return [Derivation("El", (d,), ArityJudgement(ctx, e, ZERO, local))
            for d in search(ctx, local, e.term, depth - 1)
            if d.conclusion.arity == ZERO]


def _binder_rule(cls, body_class):
    def rule(ctx, local, e, consts, depth, search):
        if not isinstance(e, cls):
            return []
        k, b = (e.kind, e.body) if cls is Lam else (e.dom, e.cod)
        if not is_kind(k) or not body_class(b):
            return []
        out = []
        for dk in search(ctx, local, k, depth - 1):
            a1 = dk.conclusion.arity
            for db in search(ctx, (a1,) + local, b, depth - 1):
                j = ArityJudgement(ctx, e, Pair(a1, db.conclusion.arity), local)
                out.append(Derivation(cls.__name__, (dk, db), j))
        return out
    return rule


def _app_rule(cls, head_class):
    def rule(ctx, local, e, consts, depth, search):
        if not isinstance(e, cls):
            return []
        f, n = (e.fun, e.arg) if cls is App else (e.kind, e.arg)
        if not head_class(f) or not is_term(n):
            return []
        heads = search(ctx, local, f, depth - 1)
        args = search(ctx, local, n, depth - 1)
        out = []
        for dh, dn in itertools.product(heads, args):
            fa = dh.conclusion.arity
            if isinstance(fa, Pair) and fa.left == dn.conclusion.arity:
                j = ArityJudgement(ctx, e, fa.right, local)
                out.append(Derivation(cls.__name__, (dh, dn), j))
        return out
    return rule


RULES = {
    "var": _r_var,
    "bound": _r_bound,
    "const": _r_const,
    "Type": _r_type,
    "El": _r_el,
    "Pi": _binder_rule(Pi, is_kind),
    "KApp": _app_rule(KApp, is_kind),
    "Lam": _binder_rule(Lam, is_term),
    "App": _app_rule(App, is_term),
}


def enumerate_derivations(ctx: ArityContext, subject: Expr, depth: int, sig=None,
                          rule_order: Sequence[str] | None = None) -> list[Derivation]:
    """Every derivation of `ctx |- subject : a`, any `a`, of height <= depth.

    Each rule is tried against every goal; none of them consults the others,
    so the search does not presuppose that the system is syntax-directed.
    """
    rules = [RULES[r] for r in (rule_order or RULES)]
    consts = const_arities(sig)

    def search(ctx, local, e, depth):
        if depth <= 0:
            return []
        out = []
        for rule in rules:
            out.extend(rule(ctx, local, e, consts, depth, search))
        return out

    return search(ctx, (), subject, depth)
