"""Bound audit: measure a closed term and compare every measurement with its bound family."""

import logging
from typing import Literal

from pydantic import BaseModel, Field

from linrec.config import Caps, settings
from linrec.core.algebra import DEFAULT_FAMILY, AlgebraFamily
from linrec.core.bounds import (
    BoundValue,
    Exponent,
    bound_value,
    elementary_bound,
    justification_bounds,
    polynomial_bound,
    primrec_bound,
)
from linrec.core.checker import check, highest_tier, recursion_depth
from linrec.core.checks import (
    StructuralReport,
    Verdict,
    combine,
    decide,
    generated_by,
    stack_sets,
    structural_report,
)
from linrec.core.evaluator import explore, normalize
from linrec.core.graph import build_graph, graph_size
from linrec.core.semantics import enumerate_trees
from linrec.core.subsystems import ContractionClass, Subsystem
from linrec.core.terms import Term, print_term
from linrec.errors import FuelExhausted, ResourceLimit

logger = logging.getLogger(__name__)

BoundFamily = Literal["primrec", "elementary", "polynomial"]


class BoundCheck(BaseModel):
    name: str
    bound: BoundValue
    measured: int
    verdict: Verdict
    informational: bool = False
    note: str = ""


class AuditReport(BaseModel):
    term: str
    subsystem: str
    family: BoundFamily

    term_size: int
    graph_size: int
    recursion_depth: int
    highest_tier: int
    max_arity: int
    graph_ratio: float  # |G| / |M|

    steps: int
    steps_exact: bool
    max_reduct_size: int
    algebraic_potential: int
    reducts_exhaustive: bool

    trees: int
    trees_exhaustive: bool
    max_label_size: int
    max_stack_set: int
    generated_by_empty_stack: bool

    checks: list[BoundCheck] = Field(default_factory=list)
    structural: StructuralReport
    verdict: Verdict


def bound_family(system: Subsystem) -> BoundFamily:
    if not system.ramified:
        return "primrec"
    return "elementary" if system.contraction is ContractionClass.ALL else "polynomial"


def _justification(d: int, x: int, y: int, k: int, ceiling_bits: int) -> tuple[BoundValue, BoundValue]:
    try:
        j = justification_bounds(d, x, y, k)
    except ResourceLimit:
        return BoundValue.beyond(ceiling_bits), BoundValue.beyond(ceiling_bits)
    return BoundValue.of(j.p), BoundValue.of(j.q)


def _compare(name: str, bound: BoundValue, measured: int, exact: bool, **kw) -> BoundCheck:
    return BoundCheck(
        name=name,
        bound=bound,
        measured=measured,
        verdict=decide(not bound.dominates(measured), exact),
        **kw,
    )


def label_bound(
    system: Subsystem, *, depth: int, tier: int, x: int, k: int, ceiling_bits: int
) -> BoundValue:
    """The label-size bound of `system` evaluated at argument x."""
    match bound_family(system):
        case "primrec":
            return bound_value(primrec_bound, depth, x, 1, k, ceiling_bits=ceiling_bits)
        case "elementary":
            return bound_value(elementary_bound, tier, depth, x, k, ceiling_bits=ceiling_bits)
    return _polynomial(tier, depth, x, "m", ceiling_bits)


def _polynomial(tier: int, depth: int, x: int, exponent: Exponent, ceiling_bits: int) -> BoundValue:
    value = polynomial_bound(tier, depth, x, exponent=exponent)
    if value.bit_length() > ceiling_bits:
        return BoundValue.beyond(ceiling_bits)
    return BoundValue.of(value)


def audit(
    m: Term,
    system: Subsystem,
    caps: Caps | None = None,
    family: AlgebraFamily = DEFAULT_FAMILY,
) -> AuditReport:
    """Type, run, saturate and measure a closed term against the bounds of its subsystem."""
    caps = caps or settings.caps
    ceiling = caps.ceiling_bits
    d = check(None, m, None, system, family)
    g = build_graph(d)
    size_m, size_g = m.size, graph_size(g)
    depth, tier, k = recursion_depth(d), highest_tier(d), family.max_arity
    logger.info("auditing %s in %s: |M|=%d |G|=%d R=%d I=%d", print_term(m), system, size_m, size_g, depth, tier)

    try:
        _, stats = normalize(m, caps.fuel)
        steps_exact = True
    except FuelExhausted as exc:
        stats, steps_exact = exc.stats, False
    ex = explore(m, caps)
    potential = ex.max_argument_size
    sat = enumerate_trees(g, caps)
    sets = stack_sets(sat)
    max_label = max((t.term.size for t in sat), default=0)
    max_stacks = max((len(s) for s in sets.values()), default=0)

    p, q = _justification(depth, size_m, potential, k, ceiling)
    checks = [
        _compare("justification-steps", p, stats.steps, steps_exact and ex.exhaustive),
        _compare("justification-size", q, ex.max_term_size, ex.exhaustive),
        _compare(
            "label-size",
            label_bound(system, depth=depth, tier=tier, x=size_g, k=k, ceiling_bits=ceiling),
            max_label,
            sat.exhaustive,
            note="argument |G|",
        ),
        _compare(
            "label-size-term",
            label_bound(system, depth=depth, tier=tier, x=size_m, k=k, ceiling_bits=ceiling),
            max_label,
            sat.exhaustive,
            informational=True,
            note="argument |M|",
        ),
    ]
    if bound_family(system) == "polynomial":
        checks.append(
            _compare(
                "label-size-printed-exponent",
                _polynomial(tier, depth, size_g, "printed", ceiling),
                max_label,
                sat.exhaustive,
                informational=True,
                note="exponent n as printed",
            )
        )

    structural = structural_report(sat, d, system, family)
    binding = [c.verdict for c in checks if not c.informational] + [structural.verdict]
    verdict = combine(binding)
    if verdict is Verdict.FAIL:
        logger.warning("audit of %s failed: %s", print_term(m), [c.name for c in checks if c.verdict is Verdict.FAIL])

    return AuditReport(
        term=print_term(m),
        subsystem=system.id,
        family=bound_family(system),
        term_size=size_m,
        graph_size=size_g,
        recursion_depth=depth,
        highest_tier=tier,
        max_arity=k,
        graph_ratio=round(size_g / size_m, 6),
        steps=stats.steps,
        steps_exact=steps_exact,
        max_reduct_size=ex.max_term_size,
        algebraic_potential=potential,
        reducts_exhaustive=ex.exhaustive,
        trees=len(sat),
        trees_exhaustive=sat.exhaustive,
        max_label_size=max_label,
        max_stack_set=max_stacks,
        generated_by_empty_stack=generated_by(sat, [()]) == set(sat.trees),
        checks=checks,
        structural=structural,
        verdict=verdict,
    )
