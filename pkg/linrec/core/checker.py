"""Type checking: builds explicit derivations for annotated terms.

Checking is bidirectional and syntax-directed. Binder annotations give the
types of variables; constructor tiers come from the expected type or, in
synthesis positions, from an argument or an explicit `@n`. A variable free
in several premises of an application, conditional or recursion is renamed
apart in those premises and merged again by contraction nodes placed right
below the join, after checking that its type is in the contraction class.
Weakening is only emitted directly above the abstraction that binds the
unused variable, so every derivation returned is in standard form.
"""

import itertools
import logging
from collections import Counter
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, replace
from enum import Enum

from linrec.core.algebra import DEFAULT_FAMILY, AlgebraFamily
from linrec.core.subsystems import Subsystem
from linrec.core.terms import (
    Abs,
    App,
    Cond,
    Cons,
    Rec,
    Term,
    Var,
    print_term,
    rename_free,
    spine,
)
from linrec.core.types import (
    Arrow,
    Base,
    Type,
    arrows,
    constant_type,
    final_codomain,
    level,
    print_type,
)
from linrec.errors import (
    AmbiguousTier,
    BranchArityMismatch,
    ContractionNotAllowed,
    NonStandardDerivation,
    RamificationViolation,
    RecursionContextViolation,
    TypeMismatch,
    UnboundVariable,
)

logger = logging.getLogger(__name__)

Context = tuple[tuple[str, Type], ...]


class Rule(str, Enum):
    AXIOM = "A"
    WEAKENING = "W"
    CONTRACTION = "C"
    ABSTRACTION = "I-o"
    APPLICATION = "E-o"
    CONSTANT = "I_A"
    CONDITIONAL = "E^C"
    RECURSION = "E^R"


@dataclass(frozen=True)
class Derivation:
    rule: Rule
    context: Context
    subject: Term
    type: Type
    premises: tuple["Derivation", ...] = ()
    # A: the variable; W: the weakened one; C: the surviving one; I-o: the binder
    variable: str | None = None
    # C: the copy merged into `variable`
    merged: str | None = None
    # I_A: the tier the constant is instantiated at
    tier: int | None = None
    # E^C / E^R
    scrutinee_tier: int | None = None
    result_type: Type | None = None
    algebra: str | None = None

    @property
    def context_map(self) -> dict[str, Type]:
        return dict(self.context)

    @property
    def branches(self) -> tuple["Derivation", ...]:
        return self.premises[:-1]

    @property
    def scrutinee(self) -> "Derivation":
        return self.premises[-1]


def _ctx(items: Mapping[str, Type]) -> Context:
    return tuple(sorted(items.items()))


def _union(premises: tuple[Derivation, ...]) -> dict[str, Type]:
    out: dict[str, Type] = {}
    for p in premises:
        out.update(p.context)
    return out


def _where(m: Term) -> str:
    text = print_term(m)
    return text if len(text) <= 80 else text[:77] + "..."


class TypeChecker:
    def __init__(self, system: Subsystem, family: AlgebraFamily = DEFAULT_FAMILY):
        self.system = system
        self.family = family
        self._fresh = itertools.count(1)

    def check(self, context: Mapping[str, Type], m: Term, expected: Type | None) -> Derivation:
        unused = set(context) - m.fv
        if unused:
            logger.debug("dropping unused context entries %s", sorted(unused))
        return self._derive(dict(context), m, expected)

    # ---- dispatch ----

    def _derive(self, ctx: dict[str, Type], m: Term, expected: Type | None) -> Derivation:
        match m:
            case Var(name):
                if name not in ctx:
                    raise UnboundVariable(f"variable {name!r} is not bound", _where(m))
                t = ctx[name]
                self._agree(expected, t, m)
                return Derivation(Rule.AXIOM, ((name, t),), m, t, variable=name)
            case Cons():
                return self._constant(m, expected)
            case Abs():
                return self._abstraction(ctx, m, expected)
            case App():
                return self._joined(ctx, m, expected)
            case Cond() | Rec():
                return self._joined(ctx, m, expected)
        raise TypeError(f"not a term: {m!r}")

    def _agree(self, expected: Type | None, actual: Type, m: Term) -> None:
        if expected is not None and expected != actual:
            raise TypeMismatch(
                f"expected {print_type(expected)} but found {print_type(actual)}", _where(m)
            )

    # ---- constants ----

    def _constant(self, m: Cons, expected: Type | None) -> Derivation:
        tier = m.tier
        if tier is None:
            if expected is None:
                raise AmbiguousTier(
                    f"cannot tell the tier of {m.constructor}; annotate it as {m.constructor}@n",
                    _where(m),
                )
            tier = self._tier_from(expected, m.constructor.algebra, m)
        t = constant_type(m.constructor, tier)
        self._agree(expected, t, m)
        return Derivation(Rule.CONSTANT, (), m, t, tier=tier, algebra=m.constructor.algebra)

    def _tier_from(self, expected: Type, algebra: str, m: Term) -> int:
        base = final_codomain(expected)
        if base.algebra != algebra:
            raise TypeMismatch(f"expected {print_type(expected)} but found a term of {algebra}", _where(m))
        return base.tier

    def _constructor_tier(self, ctx: dict[str, Type], m: Term, expected: Type | None) -> Type | None:
        """The type of `m.fun` when m is an application with a constructor at its head."""
        head, args = spine(m)
        if not isinstance(head, Cons):
            return None
        c = head.constructor
        if len(args) > c.arity:
            raise TypeMismatch(f"{c} takes {c.arity} arguments but got {len(args)}", _where(m))
        tier = head.tier
        if tier is None and expected is not None:
            tier = self._tier_from(expected, c.algebra, m)
        if tier is None:
            for a in args:
                try:
                    t = self._derive(ctx, a, None).type
                except AmbiguousTier:
                    continue
                if not isinstance(t, Base) or t.algebra != c.algebra:
                    raise TypeMismatch(
                        f"argument of {c} has type {print_type(t)}, expected a base type of {c.algebra}",
                        _where(a),
                    )
                tier = t.tier
                break
        if tier is None:
            raise AmbiguousTier(f"cannot tell the tier of {c}; annotate it as {c}@n", _where(m))
        base = Base(c.algebra, tier)
        return arrows([base] * (c.arity - len(args) + 1), base)

    # ---- abstraction ----

    def _abstraction(self, ctx: dict[str, Type], m: Abs, expected: Type | None) -> Derivation:
        cod: Type | None = None
        if expected is not None:
            if not isinstance(expected, Arrow) or expected.dom != m.annotation:
                raise TypeMismatch(
                    f"expected {print_type(expected)} for an abstraction over {print_type(m.annotation)}",
                    _where(m),
                )
            cod = expected.cod
        body = self._derive({**ctx, m.binder: m.annotation}, m.body, cod)
        if m.binder not in m.body.fv:
            body = _weaken(body, m.binder, m.annotation)
        inner = body.context_map
        del inner[m.binder]
        return Derivation(
            Rule.ABSTRACTION,
            _ctx(inner),
            m,
            Arrow(m.annotation, body.type),
            (body,),
            variable=m.binder,
        )

    # ---- joins: application, conditional, recursion ----

    def _joined(self, ctx: dict[str, Type], m: Term, expected: Type | None) -> Derivation:
        parts = [m.fun, m.arg] if isinstance(m, App) else [*m.branches, m.scrutinee]
        counts = Counter(v for p in parts for v in p.fv)
        shared = sorted(v for v, n in counts.items() if n > 1 and v in ctx)
        aliases: dict[str, list[str]] = {}
        inner_ctx = dict(ctx)
        for v in shared:
            if not self.system.admits(ctx[v], self.family):
                raise ContractionNotAllowed(v, print_type(ctx[v]), _where(m))
            seen = False
            for j, p in enumerate(parts):
                if v not in p.fv:
                    continue
                if seen:
                    alias = f"{v}#{next(self._fresh)}"
                    parts[j] = rename_free(p, v, alias)
                    inner_ctx[alias] = ctx[v]
                    aliases.setdefault(v, []).append(alias)
                seen = True

        if isinstance(m, App):
            node = self._application(inner_ctx, App(parts[0], parts[1]), expected)
        else:
            renamed = type(m)(parts[-1], tuple(parts[:-1]))
            node = self._eliminator(inner_ctx, renamed, expected)

        for v in shared:
            for alias in aliases.get(v, []):
                inner = node.context_map
                del inner[alias]
                node = Derivation(
                    Rule.CONTRACTION,
                    _ctx(inner),
                    rename_free(node.subject, alias, v),
                    node.type,
                    (node,),
                    variable=v,
                    merged=alias,
                )
        return node

    def _application(self, ctx: dict[str, Type], m: App, expected: Type | None) -> Derivation:
        fun_type = self._constructor_tier(ctx, m, expected)
        if fun_type is not None:
            fun = self._derive(ctx, m.fun, fun_type)
        else:
            try:
                fun = self._derive(ctx, m.fun, None)
            except AmbiguousTier:
                if expected is None:
                    raise
                arg = self._derive(ctx, m.arg, None)
                fun = self._derive(ctx, m.fun, Arrow(arg.type, expected))
                return self._application_node(m, fun, arg, expected)
        if not isinstance(fun.type, Arrow):
            raise TypeMismatch(
                f"{print_type(fun.type)} is not a function type", _where(m.fun)
            )
        arg = self._derive(ctx, m.arg, fun.type.dom)
        return self._application_node(m, fun, arg, expected)

    def _application_node(
        self, m: App, fun: Derivation, arg: Derivation, expected: Type | None
    ) -> Derivation:
        assert isinstance(fun.type, Arrow)
        self._agree(expected, fun.type.cod, m)
        return Derivation(
            Rule.APPLICATION, _ctx(_union((fun, arg))), m, fun.type.cod, (fun, arg)
        )

    def _eliminator(self, ctx: dict[str, Type], m: Cond | Rec, expected: Type | None) -> Derivation:
        recursive = isinstance(m, Rec)
        scrutinee = self._scrutinee(ctx, m)
        base = scrutinee.type
        assert isinstance(base, Base)
        algebra = self.family[base.algebra]
        if len(m.branches) != algebra.size:
            raise BranchArityMismatch(
                f"{algebra.name} has {algebra.size} constructors but {len(m.branches)} branches were given",
                _where(m),
            )

        def branch_type(i: int, result: Type) -> Type:
            n = algebra.constructor(i + 1).arity
            return arrows([base] * n + ([result] * n if recursive else []), result)

        result = expected or self._synthesize_result(ctx, m, base, algebra, recursive)
        if recursive and self.system.ramified and base.tier <= level(result):
            raise RamificationViolation(base.tier, level(result), _where(m))
        if recursive:
            for i, b in enumerate(m.branches, start=1):
                for v in sorted(b.fv):
                    if v in ctx and not self.system.admits(ctx[v], self.family):
                        raise RecursionContextViolation(
                            f"branch {i} of a recursion uses {v} : {print_type(ctx[v])}, "
                            "which is outside the contraction class",
                            _where(m),
                        )

        branches = tuple(
            self._derive(ctx, b, branch_type(i, result)) for i, b in enumerate(m.branches)
        )
        premises = (*branches, scrutinee)
        return Derivation(
            Rule.RECURSION if recursive else Rule.CONDITIONAL,
            _ctx(_union(premises)),
            m,
            result,
            premises,
            scrutinee_tier=base.tier,
            result_type=result,
            algebra=algebra.name,
        )

    def _scrutinee(self, ctx: dict[str, Type], m: Cond | Rec) -> Derivation:
        try:
            d = self._derive(ctx, m.scrutinee, None)
        except AmbiguousTier:
            head, _ = spine(m.scrutinee)
            if not isinstance(head, Cons):
                raise
            tier = self._tier_from_branches(m, head.constructor.algebra)
            if tier is None:
                raise
            d = self._derive(ctx, m.scrutinee, Base(head.constructor.algebra, tier))
        if not isinstance(d.type, Base):
            raise TypeMismatch(
                f"cannot branch on a value of type {print_type(d.type)}", _where(m.scrutinee)
            )
        return d

    @staticmethod
    def _tier_from_branches(m: Cond | Rec, algebra: str) -> int | None:
        for b in m.branches:
            if isinstance(b, Abs) and isinstance(b.annotation, Base) and b.annotation.algebra == algebra:
                return b.annotation.tier
        return None

    def _synthesize_result(self, ctx, m: Cond | Rec, base: Base, algebra, recursive: bool) -> Type:
        for i, b in enumerate(m.branches):
            try:
                t = self._derive(ctx, b, None).type
            except AmbiguousTier:
                continue
            n = algebra.constructor(i + 1).arity
            for _ in range(2 * n if recursive else n):
                if not isinstance(t, Arrow):
                    raise TypeMismatch(f"branch {i + 1} takes too few arguments", _where(b))
                t = t.cod
            return t
        raise AmbiguousTier("cannot tell the result type of the branches; annotate one", _where(m))


def _weaken(d: Derivation, name: str, t: Type) -> Derivation:
    return Derivation(
        Rule.WEAKENING, _ctx({**d.context_map, name: t}), d.subject, d.type, (d,), variable=name
    )


def check(
    context: Mapping[str, Type] | None,
    m: Term,
    expected: Type | None,
    system: Subsystem,
    family: AlgebraFamily = DEFAULT_FAMILY,
) -> Derivation:
    """A standard-form derivation of `context |- m : expected` valid in `system`.

    Entries of `context` not free in `m` are left out of the conclusion. With
    `expected=None` the type is synthesized.
    """
    return TypeChecker(system, family).check(context or {}, m, expected)


def annotate_tiers(d: Derivation) -> Term:
    """The subject of d with every constant carrying the tier it was typed at."""
    match d.rule:
        case Rule.AXIOM:
            return Var(d.variable)
        case Rule.WEAKENING:
            return annotate_tiers(d.premises[0])
        case Rule.CONTRACTION:
            return rename_free(annotate_tiers(d.premises[0]), d.merged, d.variable)
        case Rule.ABSTRACTION:
            assert isinstance(d.subject, Abs)
            return Abs(d.subject.binder, d.subject.annotation, annotate_tiers(d.premises[0]))
        case Rule.APPLICATION:
            return App(annotate_tiers(d.premises[0]), annotate_tiers(d.premises[1]))
        case Rule.CONSTANT:
            assert isinstance(d.subject, Cons)
            return Cons(d.subject.constructor, d.tier)
    branches = tuple(annotate_tiers(b) for b in d.branches)
    node = Rec if d.rule is Rule.RECURSION else Cond
    return node(annotate_tiers(d.scrutinee), branches)


# ---- metrics ----


def iter_nodes(d: Derivation) -> Iterator[Derivation]:
    stack = [d]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.premises))


def recursion_depth(d: Derivation) -> int:
    """R: the largest number of recursion instances on one branch of the derivation."""
    below = max((recursion_depth(p) for p in d.premises), default=0)
    return below + (1 if d.rule is Rule.RECURSION else 0)


def highest_tier(d: Derivation) -> int:
    """I: the highest scrutinee tier over recursion instances, 0 without recursion."""
    return max(
        (n.scrutinee_tier or 0 for n in iter_nodes(d) if n.rule is Rule.RECURSION), default=0
    )


def is_standard_form(d: Derivation) -> bool:
    for node in iter_nodes(d):
        for p in node.premises:
            if p.rule is Rule.WEAKENING and not (
                node.rule is Rule.ABSTRACTION and node.variable == p.variable
            ):
                return False
    return d.rule is not Rule.WEAKENING


def require_standard_form(d: Derivation) -> None:
    if not is_standard_form(d):
        raise NonStandardDerivation("weakening must sit directly above the abstraction binding it")


def standardize(d: Derivation) -> Derivation:
    """Drop weakenings and reintroduce them only above the abstractions that need them."""
    if d.rule is Rule.WEAKENING:
        return standardize(d.premises[0])
    premises = tuple(standardize(p) for p in d.premises)
    match d.rule:
        case Rule.ABSTRACTION:
            (body,) = premises
            assert isinstance(d.subject, Abs)
            if d.variable not in body.context_map:
                body = _weaken(body, d.subject.binder, d.subject.annotation)
            inner = body.context_map
            del inner[d.subject.binder]
            return replace(d, context=_ctx(inner), premises=(body,))
        case Rule.CONTRACTION:
            (body,) = premises
            inner = body.context_map
            if d.merged not in inner:
                return replace(body, subject=d.subject)
            del inner[d.merged]
            return replace(d, context=_ctx(inner), premises=(body,))
        case Rule.APPLICATION | Rule.CONDITIONAL | Rule.RECURSION:
            return replace(d, context=_ctx(_union(premises)), premises=premises)
    return d


def validate_derivation(
    d: Derivation, system: Subsystem, family: AlgebraFamily = DEFAULT_FAMILY
) -> list[str]:
    """Re-check every rule instance against its schema and the subsystem; empty when valid."""
    problems: list[str] = []
    for node in iter_nodes(d):
        for p in _instance_problems(node, system, family):
            problems.append(f"{node.rule.value} at {_where(node.subject)}: {p}")
    return problems


def _instance_problems(node: Derivation, system: Subsystem, family: AlgebraFamily) -> list[str]:
    out: list[str] = []
    ctx, ps, m = node.context_map, node.premises, node.subject
    match node.rule:
        case Rule.AXIOM:
            if ps or not isinstance(m, Var) or ctx != {m.name: node.type}:
                out.append("axiom must conclude x:A |- x:A")
        case Rule.WEAKENING:
            (p,) = ps
            if node.variable in p.context_map or ctx != {**p.context_map, node.variable: ctx.get(node.variable)}:
                out.append("weakening must add exactly one fresh variable")
            if p.subject != m or p.type != node.type:
                out.append("weakening must not change subject or type")
        case Rule.CONTRACTION:
            (p,) = ps
            inner = p.context_map
            t = inner.get(node.variable or "")
            if t is None or inner.get(node.merged or "") != t:
                out.append("contracted variables must share a type")
            elif not system.admits(t, family):
                out.append(f"contraction at {print_type(t)} is outside the contraction class")
            expected_ctx = {k: v for k, v in inner.items() if k != node.merged}
            if ctx != expected_ctx or m != rename_free(p.subject, node.merged or "", node.variable or ""):
                out.append("contraction must merge exactly the two copies")
        case Rule.ABSTRACTION:
            (p,) = ps
            if not isinstance(m, Abs) or p.subject != m.body:
                out.append("abstraction premise must type its body")
            elif p.context_map.get(m.binder) != m.annotation:
                out.append("the bound variable must appear in the premise context")
            elif ctx != {k: v for k, v in p.context_map.items() if k != m.binder}:
                out.append("abstraction must discharge exactly its binder")
            elif node.type != Arrow(m.annotation, p.type):
                out.append("abstraction type must be annotation -o body type")
        case Rule.APPLICATION:
            fun, arg = ps
            if not isinstance(m, App) or (fun.subject, arg.subject) != (m.fun, m.arg):
                out.append("application premises must type function and argument")
            if fun.type != Arrow(arg.type, node.type):
                out.append("function type must be argument -o result")
            out.extend(_split_problems(ctx, ps))
        case Rule.CONSTANT:
            if not isinstance(m, Cons) or ps or ctx:
                out.append("constants are typed in the empty context")
            elif node.type != constant_type(m.constructor, node.tier or 0) or (
                m.tier is not None and m.tier != node.tier
            ):
                out.append("constant type must follow its arity at one tier")
        case Rule.CONDITIONAL | Rule.RECURSION:
            out.extend(_eliminator_problems(node, system, family))
    return out


def _split_problems(ctx: dict[str, Type], premises: tuple[Derivation, ...]) -> list[str]:
    names = [k for p in premises for k, _ in p.context]
    if len(names) != len(set(names)):
        return ["premise contexts must be disjoint"]
    if ctx != _union(premises):
        return ["conclusion context must be the union of the premise contexts"]
    return []


def _eliminator_problems(node: Derivation, system: Subsystem, family: AlgebraFamily) -> list[str]:
    out: list[str] = []
    m = node.subject
    recursive = node.rule is Rule.RECURSION
    if not isinstance(m, Rec if recursive else Cond):
        return ["subject does not match the rule"]
    scrutinee = node.scrutinee
    base = scrutinee.type
    if not isinstance(base, Base) or base.algebra not in family:
        return ["scrutinee must have a base type"]
    algebra = family[base.algebra]
    if len(node.branches) != algebra.size or scrutinee.subject != m.scrutinee:
        return ["one branch per constructor is required"]
    for i, b in enumerate(node.branches):
        n = algebra.constructor(i + 1).arity
        want = arrows([base] * n + ([node.type] * n if recursive else []), node.type)
        if b.type != want or b.subject != m.branches[i]:
            out.append(f"branch {i + 1} must have type {print_type(want)}")
        if recursive:
            for v, t in b.context:
                if not system.admits(t, family):
                    out.append(f"branch {i + 1} context holds {v} : {print_type(t)}")
    if recursive and system.ramified and base.tier <= level(node.type):
        out.append(f"recursion on tier {base.tier} cannot produce level {level(node.type)}")
    out.extend(_split_problems(node.context_map, node.premises))
    return out


def render_derivation(d: Derivation, indent: int = 0) -> str:
    lines: list[str] = []

    def walk(node: Derivation, depth: int) -> None:
        ctx = ", ".join(f"{k}:{print_type(t)}" for k, t in node.context)
        subject = print_term(node.subject)
        lines.append(f"{'  ' * depth}[{node.rule.value}] {ctx} |- {subject} : {print_type(node.type)}")
        for p in node.premises:
            walk(p, depth + 1)

    walk(d, indent)
    return "\n".join(lines)
