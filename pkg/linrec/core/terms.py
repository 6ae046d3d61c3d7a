"""Terms of the calculus: variables, constructors, application, abstraction,
conditionals `M {{ M1, ..., Mk }}` and recursions `M << M1, ..., Mk >>`.

Nodes are immutable and cache their size, hash and free variables, so the
evaluator and the reduct explorer can compare and measure them cheaply.
"""

from collections.abc import Iterable
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from linrec.core.algebra import AlgTerm, Constructor
from linrec.core.types import Type, print_type

_NO_FV: frozenset[str] = frozenset()


def _seal(node: Any, size: int, fv: frozenset[str], key: tuple) -> None:
    object.__setattr__(node, "size", size)
    object.__setattr__(node, "fv", fv)
    object.__setattr__(node, "_hash", hash(key))


@dataclass(frozen=True)
class Var:
    name: str
    size: int = field(init=False, repr=False, compare=False)
    fv: frozenset[str] = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        _seal(self, 1, frozenset((self.name,)), ("v", self.name))

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True)
class Cons:
    """A constructor constant; `tier` is the optional `@n` instantiation."""

    constructor: Constructor
    tier: int | None = None
    size: int = field(init=False, repr=False, compare=False)
    fv: frozenset[str] = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        _seal(self, 1, _NO_FV, ("c", self.constructor, self.tier))

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"
    size: int = field(init=False, repr=False, compare=False)
    fv: frozenset[str] = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        _seal(
            self,
            self.fun.size + self.arg.size,
            self.fun.fv | self.arg.fv,
            ("@", self.fun._hash, self.arg._hash),
        )

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True)
class Abs:
    binder: str
    annotation: Type
    body: "Term"
    size: int = field(init=False, repr=False, compare=False)
    fv: frozenset[str] = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        _seal(
            self,
            self.body.size + 1,
            self.body.fv - {self.binder},
            ("\\", self.binder, self.annotation, self.body._hash),
        )

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True)
class Cond:
    scrutinee: "Term"
    branches: tuple["Term", ...]
    size: int = field(init=False, repr=False, compare=False)
    fv: frozenset[str] = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        _seal(self, *_eliminator_summary("?", self.scrutinee, self.branches))

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True)
class Rec:
    scrutinee: "Term"
    branches: tuple["Term", ...]
    size: int = field(init=False, repr=False, compare=False)
    fv: frozenset[str] = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        _seal(self, *_eliminator_summary("R", self.scrutinee, self.branches))

    def __hash__(self) -> int:
        return self._hash


def _eliminator_summary(tag: str, scrutinee: "Term", branches: tuple["Term", ...]):
    size = scrutinee.size + sum(b.size for b in branches) + len(branches)
    fv = scrutinee.fv.union(*(b.fv for b in branches))
    key = (tag, scrutinee._hash, tuple(b._hash for b in branches))
    return size, fv, key


Term = Var | Cons | App | Abs | Cond | Rec
Eliminator = Cond | Rec


def term_size(m: Term) -> int:
    return m.size


def free_vars(m: Term) -> frozenset[str]:
    return m.fv


def apply(fun: Term, *args: Term) -> Term:
    for a in args:
        fun = App(fun, a)
    return fun


def spine(m: Term) -> tuple[Term, list[Term]]:
    """Split `h a1 .. an` into its head and arguments."""
    args: list[Term] = []
    while isinstance(m, App):
        args.append(m.arg)
        m = m.fun
    args.reverse()
    return m, args


# ---- names and substitution ----


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    taken = set(avoid)
    candidate = base + "'"
    while candidate in taken:
        candidate += "'"
    return candidate


def substitute(m: Term, x: str, v: Term) -> Term:
    """M{V/x}, renaming binders that would capture free variables of V."""
    if x not in m.fv:
        return m
    match m:
        case Var():
            return v
        case App(fun, arg):
            return App(substitute(fun, x, v), substitute(arg, x, v))
        case Abs(binder, annotation, body):
            if binder in v.fv:
                fresh = fresh_name(binder, v.fv | body.fv | {x})
                body = substitute(body, binder, Var(fresh))
                binder = fresh
            return Abs(binder, annotation, substitute(body, x, v))
        case Cond(scrutinee, branches):
            return Cond(substitute(scrutinee, x, v), tuple(substitute(b, x, v) for b in branches))
        case Rec(scrutinee, branches):
            return Rec(substitute(scrutinee, x, v), tuple(substitute(b, x, v) for b in branches))
    return m


def rename_free(m: Term, x: str, y: str) -> Term:
    return substitute(m, x, Var(y))


# ---- values ----


class ValueKind(str, Enum):
    VARIABLE = "variable-value"
    ABSTRACTION = "abstraction-value"
    ALGEBRAIC = "algebraic-value"
    NON_VALUE = "non-value"


def is_algebraic(m: Term) -> bool:
    """Generated by T ::= c | T T (partial applications included)."""
    while isinstance(m, App):
        if not is_algebraic(m.arg):
            return False
        m = m.fun
    return isinstance(m, Cons)


def classify_value(m: Term) -> ValueKind:
    if isinstance(m, Var):
        return ValueKind.VARIABLE
    if isinstance(m, Abs):
        return ValueKind.ABSTRACTION
    if is_algebraic(m):
        return ValueKind.ALGEBRAIC
    return ValueKind.NON_VALUE


def is_value(m: Term) -> bool:
    return classify_value(m) is not ValueKind.NON_VALUE


def as_algebraic(m: Term) -> AlgTerm | None:
    """The data value denoted by a fully applied constructor term, else None."""
    head, args = spine(m)
    if not isinstance(head, Cons) or len(args) != head.constructor.arity:
        return None
    children = []
    for a in args:
        t = as_algebraic(a)
        if t is None:
            return None
        children.append(t)
    return AlgTerm(head.constructor, tuple(children))


def to_term(t: AlgTerm, tier: int | None = None) -> Term:
    return apply(Cons(t.constructor, tier), *(to_term(a, tier) for a in t.args))


# ---- alpha equivalence ----


def alpha_key(m: Term, _env: tuple[str, ...] = ()) -> tuple:
    """Binder-name-insensitive structural key (de Bruijn indices for bound names)."""
    match m:
        case Var(name):
            for i in range(len(_env) - 1, -1, -1):
                if _env[i] == name:
                    return ("b", len(_env) - 1 - i)
            return ("f", name)
        case Cons(constructor, tier):
            return ("c", constructor.name, tier)
        case App(fun, arg):
            return ("@", alpha_key(fun, _env), alpha_key(arg, _env))
        case Abs(binder, annotation, body):
            return ("\\", annotation, alpha_key(body, _env + (binder,)))
        case Cond(scrutinee, branches):
            return ("?", alpha_key(scrutinee, _env), tuple(alpha_key(b, _env) for b in branches))
        case Rec(scrutinee, branches):
            return ("R", alpha_key(scrutinee, _env), tuple(alpha_key(b, _env) for b in branches))
    raise TypeError(f"not a term: {m!r}")


def alpha_equal(m: Term, n: Term) -> bool:
    return alpha_key(m) == alpha_key(n)


# ---- positions ----

Path = tuple[int, ...]


def children(m: Term) -> tuple[Term, ...]:
    match m:
        case App(fun, arg):
            return (fun, arg)
        case Abs(_, _, body):
            return (body,)
        case Cond(scrutinee, branches) | Rec(scrutinee, branches):
            return (scrutinee, *branches)
    return ()


def subterm_at(m: Term, path: Path) -> Term:
    for i in path:
        m = children(m)[i]
    return m


def replace_at(m: Term, path: Path, n: Term) -> Term:
    if not path:
        return n
    i, rest = path[0], path[1:]
    match m:
        case App(fun, arg):
            return App(replace_at(fun, rest, n), arg) if i == 0 else App(fun, replace_at(arg, rest, n))
        case Abs(binder, annotation, body):
            return Abs(binder, annotation, replace_at(body, rest, n))
        case Cond(scrutinee, branches) | Rec(scrutinee, branches):
            parts = [scrutinee, *branches]
            parts[i] = replace_at(parts[i], rest, n)
            return type(m)(parts[0], tuple(parts[1:]))
    raise IndexError(f"no child {i} in {print_term(m)}")


# ---- printing ----


def print_term(m: Term) -> str:
    return _show(m, "top")


def _show(m: Term, where: str) -> str:
    # where: top | fun | arg | subject
    match m:
        case Var(name):
            return name
        case Cons(constructor, tier):
            return constructor.name if tier is None else f"{constructor.name}@{tier}"
        case Abs(binder, annotation, body):
            text = f"\\{binder}:{print_type(annotation)}. {_show(body, 'top')}"
            return text if where == "top" else f"({text})"
        case App(fun, arg):
            text = f"{_show(fun, 'fun')} {_show(arg, 'arg')}"
            return f"({text})" if where == "arg" else text
        case Cond(scrutinee, branches) | Rec(scrutinee, branches):
            opened, closed = ("{{", "}}") if isinstance(m, Cond) else ("<<", ">>")
            inner = ", ".join(_show(b, "top") for b in branches)
            text = f"{_show(scrutinee, 'subject')} {opened}{inner}{closed}"
            return text if where in ("top", "subject") else f"({text})"
    raise TypeError(f"not a term: {m!r}")
