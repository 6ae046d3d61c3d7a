"""Builders for the standard library of typed terms.

Every builder takes the tier `i` the term is instantiated at and returns a
closed, fully annotated term:

    UnAdd        U^{i+1} -o U^i -o U^i     (H(A), H(W), RH(A), RH(W))
    Predecessor  U^i -o U^i
    Coerc        U^{i+1} -o U^i
    Add          U^{i+1} -o U^i -o U^i
    Square       U^{i+4} -o U^i
    Extract      C^{i+1} -o U^i
    Duplicate    U^{i+1} -o C^i
    Blowup       U^{i+1} -o C^i            (H(A), RH(A))
    Leaves       C^{i+1} -o U^i
    Exp          U^{i+2} -o U^i            (H(A), RH(A))

Terms without a system list are accepted by all six subsystems.
"""

from collections.abc import Callable

from linrec.core.algebra import (
    C_LEAF,
    C_NODE,
    DEFAULT_FAMILY,
    U_SUCC,
    U_ZERO,
    AlgebraFamily,
    AlgTerm,
)
from linrec.core.terms import (
    Abs,
    Cond,
    Cons,
    Rec,
    Term,
    Var,
    apply,
    fresh_name,
    rename_free,
)
from linrec.core.types import Arrow, Base, Type
from linrec.errors import DecodeError


def U(tier: int) -> Base:
    return Base("U", tier)


def C(tier: int) -> Base:
    return Base("C", tier)


def lam(binder: str, annotation: Type, body: Term) -> Term:
    return Abs(binder, annotation, body)


def lams(params: list[tuple[str, Type]], body: Term) -> Term:
    for binder, annotation in reversed(params):
        body = Abs(binder, annotation, body)
    return body


def v(name: str) -> Var:
    return Var(name)


succ_u = Cons(U_SUCC)
zero_u = Cons(U_ZERO)
node_c = Cons(C_NODE)
leaf_c = Cons(C_LEAF)


# ---- arithmetic on U ----


def unadd(i: int = 0) -> Term:
    return lams(
        [("x", U(i + 1)), ("y", U(i))],
        Rec(v("x"), (lams([("w", U(i + 1)), ("z", U(i))], apply(succ_u, v("z"))), v("y"))),
    )


def predecessor(i: int = 0) -> Term:
    return lam("x", U(i), Cond(v("x"), (lam("y", U(i), v("y")), zero_u)))


def coerc(i: int = 0) -> Term:
    return lam(
        "x",
        U(i + 1),
        Rec(v("x"), (lams([("y", U(i + 1)), ("w", U(i))], apply(succ_u, v("w"))), zero_u)),
    )


def add(i: int = 0) -> Term:
    step = Arrow(U(i), U(i))
    m1 = lams(
        [("w", U(i + 1)), ("z", step), ("q", U(i))],
        apply(succ_u, apply(v("z"), v("q"))),
    )
    m2 = lam("z", U(i), v("z"))
    return lams([("x", U(i + 1)), ("y", U(i))], apply(Rec(v("x"), (m1, m2)), v("y")))


def square(i: int = 0) -> Term:
    """n |-> T(n+1) + T(n), where T(n) = n(n-1)/2 is the recursion of Add over n."""
    triangle_up = Rec(apply(succ_u, v("x1")), (add(i + 1), zero_u))
    triangle = Rec(apply(coerc(i + 1), v("x2")), (add(i), zero_u))
    body = apply(add(i), triangle_up, triangle)
    shared = dup_context(body, "x1", "x2", "x", tier=i + 2, result_type=U(i), ramified=True)
    return lam("x", U(i + 4), shared)


# ---- sharing through trees ----


def extract(i: int = 0, step: int = 1) -> Term:
    """C^{i+step} -o U^i: reads back the unary number a spine of nodes encodes."""
    a = C(i + step)
    branch = lams([("y", a), ("w", a), ("z", U(i)), ("q", U(i))], apply(succ_u, v("z")))
    return lam("x", a, Rec(v("x"), (branch, zero_u)))


def duplicate(i: int = 0, step: int = 1) -> Term:
    """U^{i+step} -o C^i: n |-> c1_C t t where t encodes n as a spine of nodes."""
    a = U(i + step)
    grow = lams(
        [("z", C(i)), ("q", C(i))],
        apply(node_c, apply(node_c, v("z"), leaf_c), apply(node_c, v("q"), leaf_c)),
    )
    branch = lams([("y", a), ("w", C(i))], Cond(v("w"), (grow, leaf_c)))
    return lam("x", a, Rec(v("x"), (branch, apply(node_c, leaf_c, leaf_c))))


def overline(t: AlgTerm) -> AlgTerm:
    """The encoding of a unary number as a spine of C nodes."""
    if t.constructor == U_ZERO:
        return AlgTerm(C_LEAF)
    if t.constructor == U_SUCC:
        return AlgTerm(C_NODE, (overline(t.args[0]), AlgTerm(C_LEAF)))
    raise DecodeError(f"{t} is not a term of U")


def inhabitant(t: Type, family: AlgebraFamily = DEFAULT_FAMILY) -> Term:
    """A closed term of type t built from nullary constructors."""
    if isinstance(t, Arrow):
        return lam("d", t.dom, inhabitant(t.cod, family))
    return Cons(family[t.algebra].nullary, t.tier)


def dup_context(
    m: Term,
    x: str,
    y: str,
    w: str,
    *,
    tier: int,
    result_type: Type,
    ramified: bool = False,
) -> Term:
    """[M]^w_{x,y}: binds x and y of type U^tier to copies of w without contraction.

    Under ramification w sits at U^{tier+2}, otherwise at U^tier.
    """
    step = 1 if ramified else 0
    avoid = m.fv | {x, y, w}
    z = fresh_name("z", avoid)
    q = fresh_name("q", avoid | {z})
    mid = C(tier + step)
    body = lams([(x, U(tier)), (y, U(tier))], m)
    copies = lams(
        [(z, mid), (q, mid)],
        apply(body, apply(extract(tier, step), v(z)), apply(extract(tier, step), v(q))),
    )
    return Cond(apply(duplicate(tier + step, step), v(w)), (copies, inhabitant(result_type)))


def dup_many(
    m: Term, xs: list[str], w: str, *, tier: int, result_type: Type
) -> Term:
    """<M>^w_{x1..xn}: every xi becomes a copy of w, chaining binary duplications."""
    if not xs:
        return m
    if len(xs) == 1:
        return rename_free(m, xs[0], w)
    rest = fresh_name(w, m.fv | set(xs) | {w})
    inner = dup_many(m, xs[1:], rest, tier=tier, result_type=result_type)
    return dup_context(inner, xs[0], rest, w, tier=tier, result_type=result_type)


# ---- trees ----


def blowup(i: int = 0) -> Term:
    branch = lams([("y", U(i + 1)), ("w", C(i))], apply(node_c, v("w"), v("w")))
    return lam("x", U(i + 1), Rec(v("x"), (branch, leaf_c)))


def leaves(i: int = 0) -> Term:
    a = C(i + 1)
    adder = Arrow(U(i), U(i))
    compose = lams(
        [("y", a), ("w", a), ("z", adder), ("q", adder), ("r", U(i))],
        apply(v("z"), apply(v("q"), v("r"))),
    )
    one = lam("x", U(i), apply(succ_u, v("x")))
    return lam("x", a, apply(Rec(v("x"), (compose, one)), zero_u))


def exp(i: int = 0) -> Term:
    return lam("x", U(i + 2), apply(leaves(i), apply(blowup(i + 1), v("x"))))


BUILDERS: dict[str, Callable[[int], Term]] = {
    "UnAdd": unadd,
    "Predecessor": predecessor,
    "Coerc": coerc,
    "Add": add,
    "Square": square,
    "Extract": extract,
    "Duplicate": duplicate,
    "Blowup": blowup,
    "Leaves": leaves,
    "Exp": exp,
}

# subsystem ids each builder is typable in
TYPABLE_IN: dict[str, frozenset[str]] = {
    name: frozenset({"H(A)", "H(W)", "H(0)", "RH(A)", "RH(W)", "RH(0)"}) for name in BUILDERS
}
TYPABLE_IN["UnAdd"] = frozenset({"H(A)", "H(W)", "RH(A)", "RH(W)"})
TYPABLE_IN["Blowup"] = frozenset({"H(A)", "RH(A)"})
TYPABLE_IN["Exp"] = frozenset({"H(A)", "RH(A)"})


def build(name: str, tier: int = 0) -> Term:
    try:
        builder = BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown builder {name!r}; choose one of {', '.join(BUILDERS)}") from None
    return builder(tier)


def resolve(name: str, tier: int | None) -> Term:
    """Parser hook for `@Name` and `@Name@i`."""
    return build(name, tier or 0)
