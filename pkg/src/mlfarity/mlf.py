"""Martin-Löf's logical framework: kinding, typing and conversion.

Definitional equality is decided by normalising with beta, eta and the
active signature rules and comparing the results up to alpha.  Kind
application is not part of this grammar, so beta2 never takes part.

`theorem2_bridge` runs a typing judgement and the arity checker side by
side: the arity of a well-typed term must be the arity of its kind.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .arity import ArityJudgement, NoArity, infer_arity
from .reduction import RuleSet, normalize
from .signatures import Signature
from .syntax import (
    ZERO, App, Arity, ArityContext, Bound, Const, El, Expr, KApp, Kind, Lam,
    Pair, Pi, Position, Term, Type, Var, close, instantiate, is_term,
)


class TypingError(Exception):
    def __init__(self, position: Position, reason: str):
        super().__init__(f"at {list(position)}: {reason}")
        self.position = position
        self.reason = reason


class IllFormedKind(TypingError):
    pass


class NotMlfGrammar(TypingError):
    pass


class BridgeViolation(AssertionError):
    pass


def arity_translate(k: Kind) -> Arity:
    match k:
        case Type() | El():
            return ZERO
        case Pi(d, c):
            return Pair(arity_translate(d), arity_translate(c))
        case KApp():
            raise NotMlfGrammar((), "kind application is not an MLF kind")
    raise TypeError(f"not a kind: {k!r}")


def conversion_rules(sig: Signature | None, active=None) -> RuleSet:
    """beta + eta + the signature rules named in `active` (all if None)."""
    sig = sig or Signature()
    if active is not None:
        sig = sig.with_rules(active)
    return RuleSet(beta=True, beta2=False, eta=True, sig=sig)


@dataclass(frozen=True)
class TypeContext:
    """Validated on construction: distinct names, each kind well-formed
    in the preceding entries."""
    entries: tuple[tuple[str, Kind], ...] = ()
    sig: Signature = field(default_factory=Signature)
    active: frozenset[str] | None = None

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if self.active is not None:
            object.__setattr__(self, "active", frozenset(self.active))
        checker = self.checker()
        env: dict[str, Kind] = {}
        for i, (x, k) in enumerate(self.entries):
            if x in env:
                raise TypingError((), f"{x} declared twice in context")
            checker.check_kind(env, k, ())
            env[x] = checker.nf(k)

    def checker(self) -> "Checker":
        return Checker(self.sig, conversion_rules(self.sig, self.active))

    def env(self) -> dict[str, Kind]:
        c = self.checker()
        return {x: c.nf(k) for x, k in self.entries}

    def names(self) -> list[str]:
        return [x for x, _ in self.entries]

    def extend(self, name: str, kind: Kind) -> "TypeContext":
        return TypeContext(self.entries + ((name, kind),), self.sig, self.active)


def arity_translate_ctx(gamma: TypeContext) -> ArityContext:
    return ArityContext(tuple((x, arity_translate(k)) for x, k in gamma.entries))


@dataclass(frozen=True)
class TypingResult:
    subject: Term
    kind: Kind


class Checker:
    def __init__(self, sig: Signature, rules: RuleSet):
        self.sig = sig
        self.rules = rules
        self._fresh = itertools.count()
        self._nf: dict[Expr, Expr] = {}

    def nf(self, e: Expr) -> Expr:
        out = self._nf.get(e)
        if out is None:
            out = self._nf[e] = normalize(e, self.rules)[0]
        return out

    def conv(self, a: Expr, b: Expr) -> bool:
        return a == b or self.nf(a) == self.nf(b)

    def fresh(self, hint: str) -> str:
        return f"{hint}#{next(self._fresh)}"

    def check_kind(self, env: dict, k: Kind, pos: Position) -> None:
        match k:
            case Type():
                return
            case El(a):
                if not is_term(a):
                    raise IllFormedKind(pos, "El applied to a kind")
                ka = self.infer(env, a, pos + (0,))
                if ka != Type():
                    raise IllFormedKind(pos, f"El of a term whose kind is not Type")
                return
            case Pi(d, c):
                self.check_kind(env, d, pos + (0,))
                x = self.fresh(k.hint)
                self.check_kind({**env, x: self.nf(d)}, instantiate(c, Var(x)), pos + (1,))
                return
            case KApp():
                raise NotMlfGrammar(pos, "kind application is not an MLF kind")
        raise IllFormedKind(pos, f"not a kind: {k!r}")

    def infer(self, env: dict, t: Term, pos: Position) -> Kind:
        """The normal-form kind of `t`."""
        match t:
            case Var(x):
                if x not in env:
                    raise TypingError(pos, f"unbound variable {x}")
                return env[x]
            case Const(c):
                if c not in self.sig.kinds:
                    raise TypingError(pos, f"constant {c} has no kind")
                return self.nf(self.sig.kinds[c])
            case Lam(k, b):
                self.check_kind(env, k, pos + (0,))
                nk = self.nf(k)
                x = self.fresh(t.hint)
                kb = self.infer({**env, x: nk}, instantiate(b, Var(x)), pos + (1,))
                return Pi(nk, close(kb, x), t.hint)
            case App(f, a):
                kf = self.infer(env, f, pos + (0,))
                if not isinstance(kf, Pi):
                    raise TypingError(pos + (0,), "applied term does not have a product kind")
                ka = self.infer(env, a, pos + (1,))
                if not self.conv(ka, kf.dom):
                    from .surface import show
                    raise TypingError(pos + (1,), f"argument kind {show(ka)} does not match {show(kf.dom)}")
                return self.nf(instantiate(kf.cod, a))
            case Bound(i):
                raise TypingError(pos, f"dangling bound index {i}")
        raise TypingError(pos, f"not a term: {t!r}")


def check_kind(gamma: TypeContext, k: Kind) -> Kind:
    """Return the normal form of `k` if it is a kind in `gamma`."""
    c = gamma.checker()
    c.check_kind(gamma.env(), k, ())
    return c.nf(k)


def infer_type(gamma: TypeContext, m: Term) -> TypingResult:
    c = gamma.checker()
    return TypingResult(m, c.infer(gamma.env(), m, ()))


def conv_kind(gamma: TypeContext, k1: Kind, k2: Kind) -> bool:
    return gamma.checker().conv(k1, k2)


def conv_term(gamma: TypeContext, m1: Term, m2: Term) -> bool:
    return gamma.checker().conv(m1, m2)


def check_signature(sig: Signature) -> None:
    """Every declared kind must be a closed MLF kind."""
    gamma = TypeContext((), sig)
    for d in sig.consts:
        if d.kind is not None:
            check_kind(gamma, d.kind)


def theorem2_bridge(gamma: TypeContext, m: Term) -> ArityJudgement:
    """Type `m`, then confirm `arity(gamma) |- m : arity(K)`."""
    res = infer_type(gamma, m)
    actx = arity_translate_ctx(gamma)
    expected = arity_translate(res.kind)
    try:
        got = infer_arity(actx, m, gamma.sig)
    except NoArity as exc:
        raise BridgeViolation(f"well-typed term has no arity: {exc}") from exc
    if got != expected:
        raise BridgeViolation(f"arity {got} differs from translated kind arity {expected}")
    return ArityJudgement(actx, m, got)
