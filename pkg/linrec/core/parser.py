"""Concrete syntax: regex tokenizer plus a recursive-descent parser.

    term    := '\\' IDENT ':' type '.' term | postfix
    postfix := app ( '{{' term, ... '}}' | '<<' term, ... '>>' )*
    app     := atom atom*
    atom    := IDENT | CONS ['@' INT] | INT | b"0101" | '@' NAME ['@' INT] | '(' term ')'
    type    := tyatom [ '-o' type ]
    tyatom  := ALG '^' INT | '(' type ')'

A program may open with algebra declarations `algebra Name { c1/2, c2/0 }`.
Line comments start with `--`.
"""

import re
from collections.abc import Callable
from dataclasses import dataclass

from linrec.core.algebra import (
    DEFAULT_FAMILY,
    AlgebraFamily,
    FreeAlgebra,
    encode_binstring,
    encode_nat,
)
from linrec.core.terms import Abs, App, Cond, Cons, Rec, Term, Var, spine, to_term
from linrec.core.types import Arrow, Base, Type
from linrec.errors import ParseError

# A builder resolver maps `@Name` (and its optional `@tier`) to a closed term.
Resolver = Callable[[str, int | None], Term]

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<bits>b"[01]*")
  | (?P<sym>\{\{|\}\}|<<|>>|-o|[\\:.,()^@{}/])
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)
_CONSTRUCTOR = re.compile(r"^c(\d+)_([A-Za-z][A-Za-z0-9]*)$")


@dataclass(frozen=True)
class Token:
    kind: str  # ident | int | bits | sym | eof
    text: str
    line: int
    column: int


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup or ""
        if kind != "ws":
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        for i, ch in enumerate(m.group()):
            if ch == "\n":
                line, line_start = line + 1, pos + i + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


@dataclass(frozen=True)
class Program:
    family: AlgebraFamily
    term: Term


class _Parser:
    def __init__(self, source: str, family: AlgebraFamily, resolver: Resolver | None):
        self.tokens = tokenize(source)
        self.pos = 0
        self.family = family
        self.resolver = resolver

    # ---- token plumbing ----

    @property
    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek
        return tok.kind in ("sym", "ident") and tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> Token:
        if self.peek.kind != kind:
            self.fail(f"expected {what}")
        return self.advance()

    def fail(self, message: str, tok: Token | None = None):
        tok = tok or self.peek
        found = tok.text or "end of input"
        raise ParseError(f"{message}, found {found!r}", tok.line, tok.column)

    def finish(self) -> None:
        if self.peek.kind != "eof":
            self.fail("unexpected trailing input")

    # ---- prelude ----

    def prelude(self) -> None:
        while self.at("algebra"):
            self.advance()
            name_tok = self.expect_kind("ident", "an algebra name")
            name = name_tok.text
            if name in self.family:
                self.fail(f"algebra {name} is already declared", name_tok)
            self.expect("{")
            arities: list[int] = []
            while True:
                tok = self.expect_kind("ident", "a constructor like c1")
                if tok.text != f"c{len(arities) + 1}":
                    self.fail(f"constructors must be numbered in order, next is c{len(arities) + 1}", tok)
                self.expect("/")
                arities.append(int(self.expect_kind("int", "an arity").text))
                if not self.at(","):
                    break
                self.advance()
            self.expect("}")
            try:
                self.family = self.family.extend(FreeAlgebra.declare(name, arities))
            except ValueError as exc:
                raise ParseError(str(exc), name_tok.line, name_tok.column) from exc

    # ---- types ----

    def type_(self) -> Type:
        dom = self.type_atom()
        if self.at("-o"):
            self.advance()
            return Arrow(dom, self.type_())
        return dom

    def type_atom(self) -> Type:
        if self.at("("):
            self.advance()
            t = self.type_()
            self.expect(")")
            return t
        tok = self.expect_kind("ident", "a base type like U^0")
        if tok.text not in self.family:
            self.fail(f"unknown algebra {tok.text}", tok)
        self.expect("^")
        return Base(tok.text, int(self.expect_kind("int", "a tier").text))

    # ---- terms ----

    def term(self) -> Term:
        if self.at("\\"):
            self.advance()
            binder = self.expect_kind("ident", "a binder name").text
            if _CONSTRUCTOR.match(binder):
                self.fail("a constructor name cannot be bound")
            self.expect(":")
            annotation = self.type_()
            self.expect(".")
            return Abs(binder, annotation, self.term())
        return self.postfix()

    def postfix(self) -> Term:
        start = self.peek
        m = self.application()
        while self.at("{{") or self.at("<<"):
            opener = self.advance().text
            closer = "}}" if opener == "{{" else ">>"
            branches = [self.term()]
            while self.at(","):
                self.advance()
                branches.append(self.term())
            self.expect(closer)
            self.check_branch_count(m, len(branches), start)
            m = Cond(m, tuple(branches)) if opener == "{{" else Rec(m, tuple(branches))
        return m

    def check_branch_count(self, scrutinee: Term, count: int, tok: Token) -> None:
        head, _ = spine(scrutinee)
        if isinstance(head, Cons):
            algebra = self.family[head.constructor.algebra]
            if count != algebra.size:
                raise ParseError(
                    f"{algebra.name} has {algebra.size} constructors but {count} branches were given",
                    tok.line,
                    tok.column,
                )

    def application(self) -> Term:
        m = self.atom()
        while self.starts_atom():
            m = App(m, self.atom())
        return m

    def starts_atom(self) -> bool:
        tok = self.peek
        return (
            tok.kind in ("int", "bits")
            or (tok.kind == "ident" and tok.text != "algebra")
            or (tok.kind == "sym" and tok.text in ("(", "@"))
        )

    def atom(self) -> Term:
        tok = self.peek
        if tok.kind == "int":
            self.advance()
            return to_term(encode_nat(int(tok.text)))
        if tok.kind == "bits":
            self.advance()
            return to_term(encode_binstring(tok.text[2:-1]))
        if self.at("("):
            self.advance()
            m = self.term()
            self.expect(")")
            return m
        if self.at("@"):
            return self.builder()
        if tok.kind != "ident":
            self.fail("expected a term")
        self.advance()
        match = _CONSTRUCTOR.match(tok.text)
        if match is None:
            return Var(tok.text)
        constructor = self.family.constructor(tok.text)
        if constructor is None:
            self.fail(f"unknown constructor {tok.text}", tok)
        return Cons(constructor, self.optional_tier())

    def optional_tier(self) -> int | None:
        if self.at("@") and self.tokens[self.pos + 1].kind == "int":
            self.advance()
            return int(self.advance().text)
        return None

    def builder(self) -> Term:
        at = self.expect("@")
        name = self.expect_kind("ident", "a builder name").text
        tier = self.optional_tier()
        if self.resolver is None:
            self.fail(f"no builders are available for @{name}", at)
        try:
            return self.resolver(name, tier)
        except KeyError:
            self.fail(f"unknown builder @{name}", at)


def parse_program(
    source: str, family: AlgebraFamily = DEFAULT_FAMILY, resolver: Resolver | None = None
) -> Program:
    p = _Parser(source, family, resolver)
    p.prelude()
    term = p.term()
    p.finish()
    return Program(p.family, term)


def parse_term(
    source: str, family: AlgebraFamily = DEFAULT_FAMILY, resolver: Resolver | None = None
) -> Term:
    p = _Parser(source, family, resolver)
    term = p.term()
    p.finish()
    return term


def parse_type(source: str, family: AlgebraFamily = DEFAULT_FAMILY) -> Type:
    p = _Parser(source, family, None)
    t = p.type_()
    p.finish()
    return t
