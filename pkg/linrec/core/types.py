"""Tiered base types, linear arrows and one-hole type contexts."""

from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum

from linrec.core.algebra import Constructor


@dataclass(frozen=True)
class Base:
    algebra: str
    tier: int

    def __str__(self) -> str:
        return f"{self.algebra}^{self.tier}"


@dataclass(frozen=True)
class Arrow:
    dom: "Type"
    cod: "Type"

    def __str__(self) -> str:
        return print_type(self)


Type = Base | Arrow


def print_type(t: Type) -> str:
    if isinstance(t, Base):
        return str(t)
    dom = print_type(t.dom)
    if isinstance(t.dom, Arrow):
        dom = f"({dom})"
    return f"{dom} -o {print_type(t.cod)}"


def level(t: Type) -> int:
    """V(A): the highest tier occurring in A."""
    if isinstance(t, Base):
        return t.tier
    return max(level(t.dom), level(t.cod))


def arrows(domains: Sequence[Type], cod: Type) -> Type:
    """domains[0] -o domains[1] -o ... -o cod."""
    for d in reversed(domains):
        cod = Arrow(d, cod)
    return cod


def constant_type(c: Constructor, tier: int) -> Type:
    base = Base(c.algebra, tier)
    return arrows([base] * c.arity, base)


def final_codomain(t: Type) -> Base:
    while isinstance(t, Arrow):
        t = t.cod
    return t


def domains(t: Type) -> list[Type]:
    out: list[Type] = []
    while isinstance(t, Arrow):
        out.append(t.dom)
        t = t.cod
    return out


# ---- type contexts ----


class Polarity(str, Enum):
    POSITIVE = "+"
    NEGATIVE = "-"

    def flip(self) -> "Polarity":
        return Polarity.NEGATIVE if self is Polarity.POSITIVE else Polarity.POSITIVE


@dataclass(frozen=True)
class Hole:
    def __str__(self) -> str:
        return "[.]"


@dataclass(frozen=True)
class LeftOf:
    """`inner -o right`: the hole sits in the domain."""

    inner: "TypeContext"
    right: Type

    def __str__(self) -> str:
        inner = str(self.inner)
        if not isinstance(self.inner, Hole):
            inner = f"({inner})"
        return f"{inner} -o {print_type(self.right)}"


@dataclass(frozen=True)
class RightOf:
    """`left -o inner`: the hole sits in the codomain."""

    left: Type
    inner: "TypeContext"

    def __str__(self) -> str:
        left = print_type(self.left)
        if isinstance(self.left, Arrow):
            left = f"({left})"
        return f"{left} -o {self.inner}"


TypeContext = Hole | LeftOf | RightOf

HOLE = Hole()


def polarity(ctx: TypeContext) -> Polarity:
    p = Polarity.POSITIVE
    while not isinstance(ctx, Hole):
        if isinstance(ctx, LeftOf):
            p = p.flip()
        ctx = ctx.inner
    return p


def plug(ctx: TypeContext, t: Type) -> Type:
    if isinstance(ctx, Hole):
        return t
    if isinstance(ctx, LeftOf):
        return Arrow(plug(ctx.inner, t), ctx.right)
    return Arrow(ctx.left, plug(ctx.inner, t))


def hole_base(t: Type, ctx: TypeContext) -> Base | None:
    """The base type B with ctx[B] == t, or None when ctx is not a focus for t."""
    while True:
        if isinstance(ctx, Hole):
            return t if isinstance(t, Base) else None
        if not isinstance(t, Arrow):
            return None
        if isinstance(ctx, LeftOf):
            if ctx.right != t.cod:
                return None
            t, ctx = t.dom, ctx.inner
        else:
            if ctx.left != t.dom:
                return None
            t, ctx = t.cod, ctx.inner


def right_spine(lefts: Sequence[Type], inner: TypeContext) -> TypeContext:
    """lefts[0] -o ... -o lefts[-1] -o inner."""
    for left in reversed(lefts):
        inner = RightOf(left, inner)
    return inner


def strip_right(ctx: TypeContext, n: int) -> TypeContext | None:
    """Remove n outer RightOf layers; None when ctx is not that deep on the right."""
    for _ in range(n):
        if not isinstance(ctx, RightOf):
            return None
        ctx = ctx.inner
    return ctx


def count_right(ctx: TypeContext) -> tuple[int, TypeContext]:
    """Number of outer RightOf layers and what sits below them."""
    n = 0
    while isinstance(ctx, RightOf):
        n += 1
        ctx = ctx.inner
    return n, ctx
