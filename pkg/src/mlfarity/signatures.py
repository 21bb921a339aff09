"""Constants and constructor-headed computation rules.

A `Signature` assigns every constant an arity (and optionally an MLF kind)
and carries rewrite rules `c p1 ... pn --> rhs`.  Every rule is checked to
give both of its sides the same arity, which is what keeps new rules from
enlarging the set of terms with a correct arity.

Signature files:

    const <name> : arity <arity> [ kind <kind> ] ;
    rule [<name>] [ x:a, ... ] <lhs> --> <rhs> : <arity> ;
    finite <name> = <c1> | ... | <cn> ;
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .arity import NoArity, ctx_valid, infer_arity
from .surface import ParseError, Parser, parse_kind, parse_term
from .syntax import (
    ZERO, TYPE, App, Arity, ArityContext, Const, El, Kind, Pair, Pi, Term, Var,
    arity_chain, constants, fv, pi, spine, subst_many,
)


class SignatureError(Exception):
    pass


class ArityMismatch(SignatureError):
    pass


class NonLinearPattern(SignatureError):
    pass


class UndeclaredConstant(SignatureError):
    pass


class BadPattern(SignatureError):
    pass


@dataclass(frozen=True)
class ConstDecl:
    name: str
    arity: Arity
    kind: Kind | None = None


@dataclass(frozen=True)
class RewriteRule:
    name: str
    context: ArityContext
    lhs: Term
    rhs: Term
    arity: Arity

    @property
    def head(self) -> str:
        return spine(self.lhs)[0].name

    @property
    def nargs(self) -> int:
        return len(spine(self.lhs)[1])

    def match(self, term: Term) -> dict[str, Term] | None:
        """Bindings for the pattern variables, or None.

        A variable occurring twice must match alpha-equal subterms.
        """
        binding: dict[str, Term] = {}
        return binding if _match(self.lhs, term, binding) else None

    def contract(self, term: Term) -> Term | None:
        binding = self.match(term)
        if binding is None:
            return None
        return subst_many(self.rhs, binding)


def _match(pattern: Term, term: Term, binding: dict) -> bool:
    match pattern:
        case Var(x):
            if x in binding:
                return binding[x] == term
            binding[x] = term
            return True
        case Const():
            return pattern == term
        case App(pf, pa):
            return isinstance(term, App) and _match(pf, term.fun, binding) and _match(pa, term.arg, binding)
    return False


@dataclass(frozen=True)
class Signature:
    consts: tuple[ConstDecl, ...] = ()
    rules: tuple[RewriteRule, ...] = ()

    def __post_init__(self):
        seen = set()
        for d in self.consts:
            if d.name in seen:
                raise SignatureError(f"constant {d.name} declared twice")
            seen.add(d.name)
            if d.kind is not None:
                from .mlf import arity_translate
                if arity_translate(d.kind) != d.arity:
                    raise ArityMismatch(f"kind of {d.name} translates to "
                                        f"{arity_translate(d.kind)}, declared {d.arity}")
        names = [r.name for r in self.rules]
        if len(names) != len(set(names)):
            raise SignatureError("duplicate rule names")

    @cached_property
    def arities(self) -> dict[str, Arity]:
        return {d.name: d.arity for d in self.consts}

    @cached_property
    def kinds(self) -> dict[str, Kind]:
        return {d.name: d.kind for d in self.consts if d.kind is not None}

    @cached_property
    def rules_by_head(self) -> dict[str, list[RewriteRule]]:
        out: dict[str, list[RewriteRule]] = {}
        for r in self.rules:
            out.setdefault(r.head, []).append(r)
        return out

    def rule(self, name: str) -> RewriteRule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)

    def names(self) -> set[str]:
        return {d.name for d in self.consts}

    def merge(self, other: "Signature") -> "Signature":
        """Union of two signatures; a constant may appear in both if the
        declarations agree (a missing kind counts as agreement)."""
        consts = {d.name: d for d in self.consts}
        for d in other.consts:
            old = consts.get(d.name)
            if old is None:
                consts[d.name] = d
            elif old.arity != d.arity or (old.kind and d.kind and old.kind != d.kind):
                raise SignatureError(f"conflicting declarations of {d.name}")
            elif old.kind is None:
                consts[d.name] = d
        rules = {r.name: r for r in self.rules}
        for r in other.rules:
            if r.name in rules and rules[r.name] != r:
                raise SignatureError(f"conflicting rules named {r.name}")
            rules[r.name] = r
        return Signature(tuple(consts.values()), tuple(rules.values()))

    def with_rules(self, names) -> "Signature":
        """The same constants with only the named rules."""
        names = set(names)
        return Signature(self.consts, tuple(r for r in self.rules if r.name in names))


def _check_pattern(p: Term, depth: int):
    if isinstance(p, Var):
        return
    head, args = spine(p)
    if not isinstance(head, Const):
        raise BadPattern(f"pattern must be a variable or constructor-headed, got {p}")
    if depth >= 2 and args:
        raise BadPattern("patterns nest at most two levels deep")
    for a in args:
        _check_pattern(a, depth + 1)


def _occurrences(t: Term, counts: dict):
    match t:
        case Var(x):
            counts[x] = counts.get(x, 0) + 1
        case App(f, a):
            _occurrences(f, counts)
            _occurrences(a, counts)


def validate_rule(sig: Signature, rule: RewriteRule, require_linear: bool = False) -> RewriteRule:
    """Check a rule's shape and that both sides have the declared arity.

    Repeated pattern variables are accepted unless `require_linear`; they
    are matched up to alpha-equality.
    """
    head, args = spine(rule.lhs)
    if not isinstance(head, Const):
        raise BadPattern(f"rule {rule.name}: left-hand side must be headed by a constant")
    for a in args:
        _check_pattern(a, 1)
    for c in constants(rule.lhs) | constants(rule.rhs):
        if c not in sig.arities:
            raise UndeclaredConstant(f"rule {rule.name}: constant {c} is not declared")
    counts: dict[str, int] = {}
    _occurrences(rule.lhs, counts)
    if require_linear:
        repeated = sorted(x for x, n in counts.items() if n > 1)
        if repeated:
            raise NonLinearPattern(f"rule {rule.name}: {', '.join(repeated)} repeated")
    if not ctx_valid(rule.context):
        raise SignatureError(f"rule {rule.name}: invalid pattern context")
    stray = fv(rule.rhs) - set(counts)
    if stray:
        raise BadPattern(f"rule {rule.name}: {', '.join(sorted(stray))} not bound by the pattern")
    for side, t in (("left", rule.lhs), ("right", rule.rhs)):
        try:
            a = infer_arity(rule.context, t, sig)
        except NoArity as exc:
            raise ArityMismatch(f"rule {rule.name}: {side}-hand side has no arity ({exc})") from exc
        if a != rule.arity:
            raise ArityMismatch(f"rule {rule.name}: {side}-hand side has arity {a}, expected {rule.arity}")
    return rule


def _decl(name: str, arity: str, kind: str, consts) -> ConstDecl:
    from .surface import parse_arity
    return ConstDecl(name, parse_arity(arity), parse_kind(kind, consts))


def _rule(sig: Signature, name: str, ctx: str, lhs: str, rhs: str) -> RewriteRule:
    from .surface import parse_arity_context
    names = sig.names()
    rule = RewriteRule(name, parse_arity_context(ctx), parse_term(lhs, names),
                       parse_term(rhs, names), ZERO)
    return validate_rule(sig, rule)


def builtin_sigma() -> Signature:
    """Dependent pairs: Sigma, pair and both projections."""
    names = {"Sigma", "pair", "pi1", "pi2"}
    consts = (
        _decl("Sigma", "(0,((0,0),0))", "(A:Type)(B:(A)Type)Type", names),
        _decl("pair", "(0,((0,0),(0,(0,0))))", "(A:Type)(B:(A)Type)(a:A)(b:B(a))Sigma(A,B)", names),
        _decl("pi1", "(0,((0,0),(0,0)))", "(A:Type)(B:(A)Type)(z:Sigma(A,B))A", names),
        _decl("pi2", "(0,((0,0),(0,0)))", "(A:Type)(B:(A)Type)(z:Sigma(A,B))B(pi1(A,B,z))", names),
    )
    sig = Signature(consts)
    ctx = "A:0, B:(0,0), a:0, b:0"
    rules = (
        _rule(sig, "pi1", ctx, "pi1(A, B, pair(A, B, a, b))", "a"),
        _rule(sig, "pi2", ctx, "pi2(A, B, pair(A, B, a, b))", "b"),
    )
    return Signature(consts, rules)


def finite_type(name: str, constructors: list[str], eliminator: str | None = None,
                rule_names: list[str] | None = None) -> Signature:
    """A finite type with n constructors and its eliminator.

    The eliminator has arity ((0,0),(0,...,(0,(0,0))...)): a motive, one
    case per constructor, the scrutinee.
    """
    if not constructors:
        raise SignatureError(f"finite type {name} needs at least one constructor")
    if len(set(constructors)) != len(constructors) or name in constructors:
        raise SignatureError(f"finite type {name}: duplicate constructor names")
    elim = eliminator or f"E_{name}"
    rule_names = rule_names or [f"{elim}_{c}" for c in constructors]
    if len(rule_names) != len(constructors):
        raise SignatureError("one rule name per constructor")
    T = Const(name)
    cases = [f"p{i + 1}" for i in range(len(constructors))]
    motive = Var("P")
    k: Kind = pi("z", El(T), El(App(motive, Var("z"))))
    for p, c in reversed(list(zip(cases, constructors))):
        k = pi(p, El(App(motive, Const(c))), k)
    k = pi("P", Pi(El(T), TYPE, "z"), k)
    elim_arity = Pair(Pair(ZERO, ZERO), arity_chain(*([ZERO] * (len(constructors) + 2))))
    consts = (ConstDecl(name, ZERO, TYPE),
              *(ConstDecl(c, ZERO, El(T)) for c in constructors),
              ConstDecl(elim, elim_arity, k))
    sig = Signature(consts)
    ctx = ArityContext((("P", Pair(ZERO, ZERO)),) + tuple((p, ZERO) for p in cases))
    rules = []
    for rn, c, p in zip(rule_names, constructors, cases):
        lhs = App(Const(elim), Var("P"))
        for q in cases:
            lhs = App(lhs, Var(q))
        lhs = App(lhs, Const(c))
        rules.append(validate_rule(sig, RewriteRule(rn, ctx, lhs, Var(p), ZERO)))
    return Signature(consts, tuple(rules))


def builtin_bool() -> Signature:
    return finite_type("Bool", ["true", "false"], "E_Bool", ["b1", "b2"])


def builtin_universe() -> Signature:
    """A one-code universe: uo decodes the code bool to the type Bool."""
    names = {"U", "Bool", "bool", "uo"}
    consts = (
        _decl("U", "0", "Type", names),
        _decl("Bool", "0", "Type", names),
        _decl("bool", "0", "U", names),
        _decl("uo", "(0,0)", "(U)Type", names),
    )
    sig = Signature(consts)
    return Signature(consts, (_rule(sig, "u", "", "uo bool", "Bool"),))


BUILTINS = {
    "sigma": builtin_sigma,
    "bool": builtin_bool,
    "universe": builtin_universe,
}


def builtin(name: str) -> Signature:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise SignatureError(f"no builtin signature {name!r}; have {', '.join(BUILTINS)}") from None


def all_builtins() -> Signature:
    sig = Signature()
    for make in BUILTINS.values():
        sig = sig.merge(make())
    return sig


# -- signature files -------------------------------------------------------

def parse_signature(text: str, file: str = "<input>", base: Signature | None = None) -> Signature:
    sig = base or Signature()
    p = Parser(text, file, sig.names())
    counter = 0
    while p.tok.kind != "eof":
        start = p.tok
        try:
            if p.at("const"):
                p.advance()
                name = p.ident()
                p.expect(":")
                p.expect("arity")
                a = p.arity()
                k = None
                if p.at("kind"):
                    p.advance()
                    k = p.kind()
                p.expect(";")
                sig = sig.merge(Signature((ConstDecl(name, a, k),)))
            elif p.at("rule"):
                p.advance()
                counter += 1
                name = None
                if p.tok.kind == "ident":
                    name = p.ident()
                ctx = ArityContext()
                if p.at("["):
                    p.advance()
                    ctx = p.arity_bindings()
                    p.expect("]")
                lhs = p.term()
                p.expect("-->")
                rhs = p.term()
                p.expect(":")
                a = p.arity()
                p.expect(";")
                if name is None:
                    name = f"{spine(lhs)[0].name if isinstance(spine(lhs)[0], Const) else 'rule'}.{counter}"
                rule = validate_rule(sig, RewriteRule(name, ctx, lhs, rhs, a))
                sig = sig.merge(Signature((), (rule,)))
            elif p.at("finite"):
                p.advance()
                name = p.ident()
                p.expect("=")
                cs = [p.ident()]
                while p.at("|"):
                    p.advance()
                    cs.append(p.ident())
                p.expect(";")
                sig = sig.merge(finite_type(name, cs))
            else:
                raise p.error(f"expected 'const', 'rule' or 'finite', found {p.tok.text!r}")
        except SignatureError as exc:
            raise ParseError(str(exc), start.span) from exc
        p.consts = sig.names()
    return sig
