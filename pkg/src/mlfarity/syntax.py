"""Abstract syntax of terms, kinds and arities.

Bound variables are de Bruijn indices (`Bound`), free variables are names
(`Var`), so structural equality of two nodes is alpha-equivalence.  Binder
names survive only as printing hints and take no part in comparison.

Children of a node are addressed by position:

    Lam   0 = annotation kind, 1 = body
    App   0 = function,        1 = argument
    El    0 = term
    Pi    0 = domain kind,     1 = codomain kind
    KApp  0 = kind,            1 = argument term
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union


# -- terms -----------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Var:
    """A free (named) variable."""
    name: str


@dataclass(frozen=True, slots=True)
class Bound:
    """A bound variable; `index` counts enclosing binders, innermost is 0."""
    index: int


@dataclass(frozen=True, slots=True)
class Const:
    name: str


@dataclass(frozen=True, slots=True)
class Lam:
    kind: "Kind"
    body: "Term"
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True, slots=True)
class App:
    fun: "Term"
    arg: "Term"


# -- kinds -----------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Type:
    pass


@dataclass(frozen=True, slots=True)
class El:
    term: "Term"


@dataclass(frozen=True, slots=True)
class Pi:
    dom: "Kind"
    cod: "Kind"
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True, slots=True)
class KApp:
    """Kind application `K N`; only exists in the extended system."""
    kind: "Kind"
    arg: "Term"


Term = Union[Var, Bound, Const, Lam, App]
Kind = Union[Type, El, Pi, KApp]
Expr = Union[Term, Kind]

TERM_NODES = (Var, Bound, Const, Lam, App)
KIND_NODES = (Type, El, Pi, KApp)

TYPE = Type()


def is_term(e) -> bool:
    return isinstance(e, TERM_NODES)


def is_kind(e) -> bool:
    return isinstance(e, KIND_NODES)


# -- arities ---------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Zero:
    def __str__(self):
        return "0"


@dataclass(frozen=True, slots=True)
class Pair:
    """The arity `(left, right)`."""
    left: "Arity"
    right: "Arity"
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        # arities key many tables; hashing them must not walk the tree
        object.__setattr__(self, "_hash", hash((self.left, self.right)))

    def __hash__(self):
        return self._hash

    def __str__(self):
        return f"({self.left},{self.right})"


Arity = Union[Zero, Pair]
ZERO = Zero()


def arity_chain(*parts: Arity) -> Arity:
    """Right-nested arity: arity_chain(a, b, c) == (a,(b,c))."""
    result = parts[-1]
    for a in reversed(parts[:-1]):
        result = Pair(a, result)
    return result


@dataclass(frozen=True)
class ArityContext:
    """Ordered assignment of arities to free variables."""
    entries: tuple[tuple[str, Arity], ...] = ()

    @classmethod
    def of(cls, *pairs: tuple[str, Arity], **named: Arity) -> "ArityContext":
        return cls(tuple(pairs) + tuple(named.items()))

    def names(self) -> list[str]:
        return [x for x, _ in self.entries]

    def lookup(self, name: str) -> Arity | None:
        for x, a in reversed(self.entries):
            if x == name:
                return a
        return None

    def extend(self, name: str, arity: Arity) -> "ArityContext":
        return ArityContext(self.entries + ((name, arity),))

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __str__(self):
        return "<" + ", ".join(f"{x}:{a}" for x, a in self.entries) + ">"


# -- generic traversal -----------------------------------------------------

Position = tuple[int, ...]


class InvalidPosition(LookupError):
    pass


def children(e: Expr) -> tuple:
    match e:
        case Lam(k, b):
            return (k, b)
        case App(f, a):
            return (f, a)
        case El(t):
            return (t,)
        case Pi(d, c):
            return (d, c)
        case KApp(k, a):
            return (k, a)
    return ()


def binds(e: Expr, i: int) -> bool:
    """Whether child `i` of `e` lies under the binder of `e`."""
    return i == 1 and isinstance(e, (Lam, Pi))


def with_child(e: Expr, i: int, new: Expr) -> Expr:
    match e, i:
        case Lam(k, b), 0:
            return Lam(new, b, e.hint)
        case Lam(k, b), 1:
            return Lam(k, new, e.hint)
        case App(f, a), 0:
            return App(new, a)
        case App(f, a), 1:
            return App(f, new)
        case El(_), 0:
            return El(new)
        case Pi(d, c), 0:
            return Pi(new, c, e.hint)
        case Pi(d, c), 1:
            return Pi(d, new, e.hint)
        case KApp(k, a), 0:
            return KApp(new, a)
        case KApp(k, a), 1:
            return KApp(k, new)
    raise InvalidPosition(f"{type(e).__name__} has no child {i}")


def subterm_at(e: Expr, pos: Position) -> Expr:
    for i in pos:
        kids = children(e)
        if not 0 <= i < len(kids):
            raise InvalidPosition(f"no child {i} at {type(e).__name__}")
        e = kids[i]
    return e


def replace_at(e: Expr, pos: Position, new: Expr) -> Expr:
    if not pos:
        return new
    kids = children(e)
    i = pos[0]
    if not 0 <= i < len(kids):
        raise InvalidPosition(f"no child {i} at {type(e).__name__}")
    return with_child(e, i, replace_at(kids[i], pos[1:], new))


def depth_at(e: Expr, pos: Position) -> int:
    """Number of binders crossed on the way to `pos`."""
    d = 0
    for i in pos:
        if binds(e, i):
            d += 1
        e = children(e)[i]
    return d


def walk(e: Expr, pos: Position = (), depth: int = 0) -> Iterator[tuple[Position, int, Expr]]:
    """Pre-order traversal yielding (position, binder depth, node)."""
    yield pos, depth, e
    for i, c in enumerate(children(e)):
        yield from walk(c, pos + (i,), depth + binds(e, i))


def size(e: Expr) -> int:
    return 1 + sum(size(c) for c in children(e))


# -- de Bruijn machinery ---------------------------------------------------

def shift(e: Expr, d: int, cutoff: int = 0) -> Expr:
    """Add `d` to every bound index >= cutoff."""
    if d == 0:
        return e
    match e:
        case Bound(i):
            return Bound(i + d) if i >= cutoff else e
        case Var() | Const() | Type():
            return e
        case Lam(k, b):
            return Lam(shift(k, d, cutoff), shift(b, d, cutoff + 1), e.hint)
        case App(f, a):
            return App(shift(f, d, cutoff), shift(a, d, cutoff))
        case El(t):
            return El(shift(t, d, cutoff))
        case Pi(dom, cod):
            return Pi(shift(dom, d, cutoff), shift(cod, d, cutoff + 1), e.hint)
        case KApp(k, a):
            return KApp(shift(k, d, cutoff), shift(a, d, cutoff))
    raise TypeError(f"not an expression: {e!r}")


def instantiate(body: Expr, value: Term, depth: int = 0) -> Expr:
    """Contract the binder enclosing `body`: index 0 becomes `value`.

    `value` is expressed relative to the binder's own scope (outside it).
    """
    match body:
        case Bound(i):
            if i == depth:
                return shift(value, depth)
            return Bound(i - 1) if i > depth else body
        case Var() | Const() | Type():
            return body
        case Lam(k, b):
            return Lam(instantiate(k, value, depth), instantiate(b, value, depth + 1), body.hint)
        case App(f, a):
            return App(instantiate(f, value, depth), instantiate(a, value, depth))
        case El(t):
            return El(instantiate(t, value, depth))
        case Pi(dom, cod):
            return Pi(instantiate(dom, value, depth), instantiate(cod, value, depth + 1), body.hint)
        case KApp(k, a):
            return KApp(instantiate(k, value, depth), instantiate(a, value, depth))
    raise TypeError(f"not an expression: {body!r}")


def has_loose(e: Expr, index: int = 0) -> bool:
    """Whether bound index `index` (relative to `e`) occurs in `e`."""
    match e:
        case Bound(i):
            return i == index
        case Var() | Const() | Type():
            return False
        case Lam(k, b) | Pi(k, b):
            return has_loose(k, index) or has_loose(b, index + 1)
    return any(has_loose(c, index) for c in children(e))


def loose_indices(e: Expr, depth: int = 0) -> set[int]:
    match e:
        case Bound(i):
            return {i - depth} if i >= depth else set()
        case Var() | Const() | Type():
            return set()
        case Lam(k, b) | Pi(k, b):
            return loose_indices(k, depth) | loose_indices(b, depth + 1)
    out: set[int] = set()
    for c in children(e):
        out |= loose_indices(c, depth)
    return out


def close(e: Expr, name: str, depth: int = 0) -> Expr:
    """Abstract the free variable `name` into bound index `depth`.

    Inverse of `instantiate(e, Var(name))` when `name` is fresh.
    """
    match e:
        case Var(x):
            return Bound(depth) if x == name else e
        case Bound(i):
            return Bound(i + 1) if i >= depth else e
        case Const() | Type():
            return e
        case Lam(k, b):
            return Lam(close(k, name, depth), close(b, name, depth + 1), e.hint)
        case App(f, a):
            return App(close(f, name, depth), close(a, name, depth))
        case El(t):
            return El(close(t, name, depth))
        case Pi(dom, cod):
            return Pi(close(dom, name, depth), close(cod, name, depth + 1), e.hint)
        case KApp(k, a):
            return KApp(close(k, name, depth), close(a, name, depth))
    raise TypeError(f"not an expression: {e!r}")


def lam(name: str, kind: Kind, body: Term) -> Lam:
    """Build `\\name:kind.body` from a body mentioning `Var(name)`."""
    return Lam(kind, close(body, name), name)


def pi(name: str, dom: Kind, cod: Kind) -> Pi:
    return Pi(dom, close(cod, name), name)


def apps(head: Term, *args: Term) -> Term:
    for a in args:
        head = App(head, a)
    return head


def spine(t: Term) -> tuple[Term, list[Term]]:
    """Split `h a1 ... an` into (h, [a1, ..., an])."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


# -- substitution and free variables ---------------------------------------

def fv(e: Expr) -> frozenset[str]:
    """Free variable names, including those inside binder annotations."""
    match e:
        case Var(x):
            return frozenset((x,))
        case Bound() | Const() | Type():
            return frozenset()
    out = frozenset()
    for c in children(e):
        out |= fv(c)
    return out


def constants(e: Expr) -> frozenset[str]:
    if isinstance(e, Const):
        return frozenset((e.name,))
    out = frozenset()
    for c in children(e):
        out |= constants(c)
    return out


def subst(e: Expr, name: str, value: Term) -> Expr:
    """[value/name]e.  Capture cannot happen: binders are nameless."""
    return subst_many(e, {name: value})


def subst_many(e: Expr, mapping: dict[str, Term], depth: int = 0) -> Expr:
    """Simultaneous substitution for free variables."""
    if not mapping:
        return e
    match e:
        case Var(x):
            if x in mapping:
                return shift(mapping[x], depth)
            return e
        case Bound() | Const() | Type():
            return e
        case Lam(k, b):
            return Lam(subst_many(k, mapping, depth), subst_many(b, mapping, depth + 1), e.hint)
        case App(f, a):
            return App(subst_many(f, mapping, depth), subst_many(a, mapping, depth))
        case El(t):
            return El(subst_many(t, mapping, depth))
        case Pi(dom, cod):
            return Pi(subst_many(dom, mapping, depth), subst_many(cod, mapping, depth + 1), e.hint)
        case KApp(k, a):
            return KApp(subst_many(k, mapping, depth), subst_many(a, mapping, depth))
    raise TypeError(f"not an expression: {e!r}")


def alpha_eq(lhs: Expr, rhs: Expr) -> bool:
    return lhs == rhs


def fresh_name(base: str, avoid) -> str:
    if base not in avoid:
        return base
    stem = base.rstrip("0123456789")
    n = 1
    while f"{stem}{n}" in avoid:
        n += 1
    return f"{stem}{n}"
