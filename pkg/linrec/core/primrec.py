"""Primitive recursive function schemes and their compilation into H(0) terms.

Every compiled function of arity n has type U^0 -o ... -o U^0 (n arrows) and
uses no contraction: an argument needed twice is shared by duplicating it
through a tree and extracting both copies.
"""

import itertools
import re
from dataclasses import dataclass

from linrec.core.algebra import U_SUCC, U_ZERO
from linrec.core.stdlib import U, dup_many, lams, v
from linrec.core.terms import Cons, Rec, Term, apply
from linrec.core.types import arrows
from linrec.errors import ParseError


@dataclass(frozen=True)
class Zero:
    """The constant 0 taking `n` ignored arguments."""

    n: int = 1

    @property
    def arity(self) -> int:
        return self.n


@dataclass(frozen=True)
class Succ:
    @property
    def arity(self) -> int:
        return 1


@dataclass(frozen=True)
class Proj:
    n: int
    i: int  # 1-based

    @property
    def arity(self) -> int:
        return self.n


@dataclass(frozen=True)
class Compose:
    f: "PrimRecFunction"
    gs: tuple["PrimRecFunction", ...]

    @property
    def arity(self) -> int:
        return self.gs[0].arity


@dataclass(frozen=True)
class PrimRec:
    """h(0, xs) = f(xs); h(n+1, xs) = g(n, h(n, xs), xs)."""

    f: "PrimRecFunction"
    g: "PrimRecFunction"

    @property
    def arity(self) -> int:
        return self.f.arity + 1


PrimRecFunction = Zero | Succ | Proj | Compose | PrimRec


def validate(fn: PrimRecFunction) -> None:
    """Raise ValueError when the arities of a scheme do not line up."""
    match fn:
        case Zero(n) if n < 0:
            raise ValueError("zero takes a non-negative number of arguments")
        case Proj(n, i) if not 1 <= i <= n:
            raise ValueError(f"proj({n},{i}) selects outside 1..{n}")
        case Compose(f, gs):
            if not gs:
                raise ValueError("composition needs at least one inner function")
            validate(f)
            for g in gs:
                validate(g)
            if f.arity != len(gs):
                raise ValueError(f"outer function takes {f.arity} arguments, {len(gs)} given")
            if len({g.arity for g in gs}) != 1:
                raise ValueError("inner functions of a composition must share their arity")
        case PrimRec(f, g):
            validate(f)
            validate(g)
            if g.arity != f.arity + 2:
                raise ValueError(f"step function takes {g.arity} arguments, expected {f.arity + 2}")


def evaluate_primrec(fn: PrimRecFunction, args: list[int]) -> int:
    if len(args) != fn.arity:
        raise ValueError(f"expected {fn.arity} arguments, got {len(args)}")
    match fn:
        case Zero():
            return 0
        case Succ():
            return args[0] + 1
        case Proj(_, i):
            return args[i - 1]
        case Compose(f, gs):
            return evaluate_primrec(f, [evaluate_primrec(g, args) for g in gs])
        case PrimRec(f, g):
            n, rest = args[0], args[1:]
            acc = evaluate_primrec(f, rest)
            for k in range(n):
                acc = evaluate_primrec(g, [k, acc, *rest])
            return acc
    raise TypeError(f"not a primitive recursive scheme: {fn!r}")


# ---- compilation ----


class _Compiler:
    def __init__(self) -> None:
        self._ids = itertools.count(1)

    def fresh(self, base: str) -> str:
        return f"{base}{next(self._ids)}"

    def compile(self, fn: PrimRecFunction) -> Term:
        match fn:
            case Zero(n):
                return lams([(self.fresh("x"), U(0)) for _ in range(n)], Cons(U_ZERO, 0))
            case Succ():
                x = self.fresh("x")
                return lams([(x, U(0))], apply(Cons(U_SUCC, 0), v(x)))
            case Proj(n, i):
                xs = [self.fresh("x") for _ in range(n)]
                return lams([(x, U(0)) for x in xs], v(xs[i - 1]))
            case Compose(f, gs):
                return self.composition(f, gs)
            case PrimRec(f, g):
                return self.recursion(f, g)
        raise TypeError(f"not a primitive recursive scheme: {fn!r}")

    def composition(self, f: PrimRecFunction, gs: tuple[PrimRecFunction, ...]) -> Term:
        m = gs[0].arity
        ys = [self.fresh("y") for _ in range(m)]
        # copies[j][k]: the copy of argument j handed to the k-th inner function
        copies = [[self.fresh(f"{y}_") for _ in gs] for y in ys]
        inner = [
            apply(self.compile(g), *(v(copies[j][k]) for j in range(m))) for k, g in enumerate(gs)
        ]
        body = apply(self.compile(f), *inner)
        for j, y in enumerate(ys):
            body = dup_many(body, copies[j], y, tier=0, result_type=U(0))
        return lams([(y, U(0)) for y in ys], body)

    def recursion(self, f: PrimRecFunction, g: PrimRecFunction) -> Term:
        m = f.arity
        result = arrows([U(0)] * m, U(0))
        y, w, x = self.fresh("y"), self.fresh("w"), self.fresh("x")
        zs = [self.fresh("z") for _ in range(m)]
        to_w = [self.fresh(f"{z}_") for z in zs]
        to_g = [self.fresh(f"{z}_") for z in zs]
        body = apply(self.compile(g), v(y), apply(v(w), *map(v, to_w)), *map(v, to_g))
        for z, a, b in zip(zs, to_w, to_g):
            body = dup_many(body, [a, b], z, tier=0, result_type=U(0))
        step = lams([(y, U(0)), (w, result)] + [(z, U(0)) for z in zs], body)
        return lams([(x, U(0))], Rec(v(x), (step, self.compile(f))))


def compile_primrec(fn: PrimRecFunction) -> Term:
    """A closed H(0) term of type U^0 -o^n U^0 computing fn on unary numerals."""
    validate(fn)
    return _Compiler().compile(fn)


# ---- concrete syntax ----

addition = PrimRec(Proj(1, 1), Compose(Succ(), (Proj(3, 2),)))
multiplication = PrimRec(Zero(1), Compose(addition, (Proj(3, 2), Proj(3, 3))))
predecessor = PrimRec(Zero(0), Proj(2, 1))

NAMED: dict[str, PrimRecFunction] = {
    "addition": addition,
    "multiplication": multiplication,
    "predecessor": predecessor,
}

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[(),]))")


def parse_primrec(text: str) -> PrimRecFunction:
    """zero | zero(n) | succ | proj(n,i) | comp(f, g1, ..., gk) | rec(f, g) | a named function."""
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    while pos < len(text.rstrip()):
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", 1, pos + 1)
        kind = match.lastgroup
        assert kind is not None
        tokens.append((kind, match.group(kind), match.start(kind) + 1))
        pos = match.end()
    tokens.append(("eof", "", len(text) + 1))
    index = 0

    def peek() -> tuple[str, str, int]:
        return tokens[index]

    def take(kind: str, value: str | None = None) -> str:
        nonlocal index
        k, text_, col = tokens[index]
        if k != kind or (value is not None and text_ != value):
            raise ParseError(f"expected {value or kind}, found {text_ or 'end of input'!r}", 1, col)
        index += 1
        return text_

    def number() -> int:
        return int(take("int"))

    def function() -> PrimRecFunction:
        _, word, col = peek()
        name = take("name")
        if name == "zero":
            if peek()[1] == "(":
                take("sym", "(")
                n = number()
                take("sym", ")")
                return Zero(n)
            return Zero(1)
        if name == "succ":
            return Succ()
        if name == "proj":
            take("sym", "(")
            n = number()
            take("sym", ",")
            i = number()
            take("sym", ")")
            return Proj(n, i)
        if name in ("comp", "rec"):
            take("sym", "(")
            parts = [function()]
            while peek()[1] == ",":
                take("sym", ",")
                parts.append(function())
            take("sym", ")")
            if name == "rec":
                if len(parts) != 2:
                    raise ParseError("rec takes exactly two functions", 1, col)
                return PrimRec(parts[0], parts[1])
            if len(parts) < 2:
                raise ParseError("comp takes an outer function and at least one inner one", 1, col)
            return Compose(parts[0], tuple(parts[1:]))
        if name in NAMED:
            return NAMED[name]
        raise ParseError(f"unknown function {word!r}", 1, col)

    fn = function()
    take("eof")
    try:
        validate(fn)
    except ValueError as exc:
        raise ParseError(str(exc), 1, 1) from None
    return fn
