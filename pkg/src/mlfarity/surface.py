"""Concrete syntax: tokenizer, parser and printer.

Grammar (application is left-associative, a lambda body extends to the
right, `-- ...` is a comment):

    term  ::= ident | "\\" ident ":" kind "." term | term term | "(" term ")"
    kind  ::= "Type" | "El" "(" term ")" | "(" ident ":" kind ")" kind
            | kind term | "(" kind ")" term | "(" kind ")" kind
    arity ::= "0" | "(" arity "," arity ")"

Conveniences that let the notation of the literature be typed in directly:
`f(a, b)` means `f a b`; a term standing where a kind is expected means
`El` of that term; `(K1)K2` is a product with an unused binder.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    ZERO, TYPE, App, Arity, ArityContext, Bound, Const, El, Expr, KApp, Kind,
    Lam, Pair, Pi, Term, Type, Var, Zero, children, constants, fresh_name, fv,
    is_kind,
)


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    col_start: int
    col_end: int

    def __str__(self):
        return f"{self.file}:{self.line}:{self.col_start}-{self.col_end}"


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span


@dataclass(frozen=True)
class Token:
    kind: str   # "ident", "num", "sym", "eof"
    text: str
    span: SourceSpan
    offset: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<arrow>-->)
  | (?P<comment>--[^\n]*)
  | (?P<ident>[^\W\d][\w']*)
  | (?P<num>\d+)
  | (?P<sym>[\\λ:.(),;|\[\]<>=])
""", re.VERBOSE)


def tokenize(text: str, file: str = "<input>") -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}",
                             SourceSpan(file, line, col, col))
        group = m.lastgroup
        chunk = m.group()
        if group in ("ident", "num", "sym", "arrow"):
            kind = "sym" if group == "arrow" else group
            tokens.append(Token(kind, chunk, SourceSpan(file, line, col, col + len(chunk) - 1), pos))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    col = pos - line_start + 1
    tokens.append(Token("eof", "", SourceSpan(file, line, max(col - 1, 1), max(col - 1, 1)), pos))
    return tokens


_KEYWORDS = {"Type", "El"}


class Parser:
    """Recursive-descent parser over a token list.

    `consts` lists identifiers that denote signature constants; any other
    unbound identifier is a free variable.
    """

    def __init__(self, text: str, file: str = "<input>", consts=()):
        self.tokens = tokenize(text, file)
        self.i = 0
        self.consts = set(consts)

    # -- token helpers --

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("sym", "ident") and self.tok.text == text

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.span)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> str:
        if self.tok.kind != "ident" or self.tok.text in _KEYWORDS:
            raise self.error(f"expected identifier, found {self.tok.text or 'end of input'!r}")
        return self.advance().text

    def expect_eof(self):
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")

    def _binder_ahead(self) -> bool:
        return (self.at("(") and self.peek().kind == "ident"
                and self.peek().text not in _KEYWORDS
                and self.peek(2).kind == "sym" and self.peek(2).text == ":")

    def _term_atom_ahead(self) -> bool:
        t = self.tok
        if t.kind == "ident":
            return t.text not in _KEYWORDS
        return t.kind == "sym" and t.text == "(" and not self._binder_ahead()

    # -- terms --

    def term(self, env: tuple[str, ...] = ()) -> Term:
        if self.at("\\") or self.at("λ"):
            self.advance()
            x = self.ident()
            self.expect(":")
            k = self.kind(env)
            self.expect(".")
            body = self.term((x,) + env)
            return Lam(k, body, x)
        head = self.term_atom(env)
        if isinstance(head, list):
            raise self.error("argument list without a function")
        while True:
            if self.at("\\") or self.at("λ"):
                head = App(head, self.term(env))
                break
            if not self._term_atom_ahead():
                break
            arg = self.term_atom(env)
            for a in (arg if isinstance(arg, list) else [arg]):
                head = App(head, a)
        return head

    def term_atom(self, env) -> Term | list[Term]:
        t = self.tok
        if t.kind == "ident":
            if t.text in _KEYWORDS:
                raise self.error(f"kind {t.text!r} where a term is expected")
            self.advance()
            return self.resolve(t.text, env)
        if self.at("("):
            self.advance()
            items = [self.term(env)]
            while self.at(","):
                self.advance()
                items.append(self.term(env))
            self.expect(")")
            return items[0] if len(items) == 1 else items
        raise self.error(f"expected a term, found {t.text or 'end of input'!r}")

    def resolve(self, name: str, env) -> Term:
        if name in env:
            return Bound(env.index(name))
        if name in self.consts:
            return Const(name)
        return Var(name)

    # -- kinds --

    def kind(self, env: tuple[str, ...] = ()) -> Kind:
        t = self.tok
        if self._binder_ahead():
            self.advance()
            x = self.ident()
            self.expect(":")
            dom = self.kind(env)
            self.expect(")")
            cod = self.kind((x,) + env)
            return Pi(dom, cod, x)
        if self.at("Type"):
            self.advance()
            k: Kind = TYPE
        elif self.at("El"):
            self.advance()
            arg = self.term_atom(env)
            if isinstance(arg, list):
                raise self.error("El takes a single term", t)
            k = El(arg)
        elif self.at("("):
            self.advance()
            inner = self._kind_or_term(env)
            self.expect(")")
            if is_kind(inner):
                if self._kind_only_ahead():
                    return Pi(inner, self.kind(("",) + env), "x")
                k = inner
            else:
                if self._kind_ahead():
                    return Pi(El(inner), self.kind(("",) + env), "x")
                k = El(inner)
        elif t.kind == "ident" or self.at("\\") or self.at("λ"):
            return El(self.term(env))
        else:
            raise self.error(f"expected a kind, found {t.text or 'end of input'!r}")
        while self._term_atom_ahead():
            arg = self.term_atom(env)
            for a in (arg if isinstance(arg, list) else [arg]):
                k = KApp(k, a)
        return k

    def _kind_only_ahead(self) -> bool:
        return self.at("Type") or self.at("El") or self._binder_ahead()

    def _kind_ahead(self) -> bool:
        return self._kind_only_ahead() or self._term_atom_ahead() or self.at("\\") or self.at("λ")

    def _kind_or_term(self, env) -> Expr:
        start = self.i
        if not self._kind_only_ahead():
            try:
                t = self.term(env)
                if self.at(")"):
                    return t
            except ParseError:
                pass
            self.i = start
        return self.kind(env)

    # -- arities and contexts --

    def arity(self) -> Arity:
        t = self.tok
        if t.kind == "num" and t.text == "0" or self.at("Zero"):
            self.advance()
            return ZERO
        if self.at("("):
            self.advance()
            left = self.arity()
            self.expect(",")
            right = self.arity()
            self.expect(")")
            return Pair(left, right)
        raise self.error(f"expected an arity, found {t.text or 'end of input'!r}")

    def arity_bindings(self) -> ArityContext:
        entries = []
        while self.tok.kind == "ident":
            x = self.ident()
            self.expect(":")
            entries.append((x, self.arity()))
            if self.at(",") or self.at(";"):
                self.advance()
        return ArityContext(tuple(entries))


# -- public parsing API ----------------------------------------------------

def parse_term(text: str, consts=(), file: str = "<input>") -> Term:
    p = Parser(text, file, consts)
    t = p.term()
    p.expect_eof()
    return t


def parse_kind(text: str, consts=(), file: str = "<input>") -> Kind:
    p = Parser(text, file, consts)
    k = p.kind()
    p.expect_eof()
    return k


def parse_arity(text: str, file: str = "<input>") -> Arity:
    p = Parser(text, file)
    a = p.arity()
    p.expect_eof()
    return a


def parse_arity_context(text: str, file: str = "<input>") -> ArityContext:
    """Entries `x : arity` separated by commas, semicolons or newlines,
    optionally wrapped in `< ... >`."""
    p = Parser(text, file)
    wrapped = p.at("<")
    if wrapped:
        p.advance()
    ctx = p.arity_bindings()
    if wrapped:
        p.expect(">")
    p.expect_eof()
    return ctx


def parse_type_context(text: str, consts=(), file: str = "<input>") -> list[tuple[str, Kind]]:
    """Lines of the form `assume x : K ;`."""
    p = Parser(text, file, consts)
    entries = []
    while p.tok.kind != "eof":
        p.expect("assume")
        x = p.ident()
        p.expect(":")
        entries.append((x, p.kind()))
        p.expect(";")
    return entries


# -- printing --------------------------------------------------------------

def show(e, names: tuple[str, ...] = ()) -> str:
    """Print a term, kind, arity or arity context.

    Binder names are chosen so that the output re-parses to an alpha-equal
    expression; bound indices that escape `e` print as `^i`.
    """
    if isinstance(e, (Zero, Pair, ArityContext)):
        return str(e)
    avoid = set(fv(e)) | set(constants(e)) | _KEYWORDS | set(names)
    return _Printer(avoid).expr(e, list(names))


class _Printer:
    def __init__(self, avoid: set[str]):
        self.avoid = avoid

    def name(self, env: list[str], i: int) -> str:
        return env[i] if i < len(env) else f"^{i - len(env)}"

    def binder(self, hint: str, env: list[str]) -> str:
        base = hint if hint and hint != "_" and hint[0].isalpha() else "x"
        return fresh_name(base, self.avoid | set(env))

    def expr(self, e, env) -> str:
        if is_kind(e):
            return self.kind(e, env)
        return self.term(e, env)

    def term(self, t, env) -> str:
        match t:
            case Var(x) | Const(x):
                return x
            case Bound(i):
                return self.name(env, i)
            case Lam(k, b):
                x = self.binder(t.hint, env)
                return f"\\{x}:{self.kind(k, env)}.{self.term(b, [x] + env)}"
            case App(f, a):
                fs = self.term(f, env)
                if isinstance(f, Lam):
                    fs = f"({fs})"
                return f"{fs} {self.arg(a, env)}"
        raise TypeError(f"not a term: {t!r}")

    def arg(self, a, env) -> str:
        s = self.term(a, env)
        return f"({s})" if isinstance(a, (App, Lam)) else s

    def kind(self, k, env) -> str:
        match k:
            case Type():
                return "Type"
            case El(t):
                return f"El({self.term(t, env)})"
            case Pi(d, c):
                x = self.binder(k.hint, env)
                return f"({x}:{self.kind(d, env)}){self.kind(c, [x] + env)}"
            case KApp(h, a):
                hs = self.kind(h, env)
                if isinstance(h, Pi):
                    hs = f"({hs})"
                return f"{hs} {self.arg(a, env)}"
        raise TypeError(f"not a kind: {k!r}")
