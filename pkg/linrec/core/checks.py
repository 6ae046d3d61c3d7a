"""Soundness instruments over a saturation: completeness, backward preservation, structural lemmas."""

import logging
from collections import defaultdict
from collections.abc import Iterable, Mapping
from enum import Enum

from pydantic import BaseModel, Field

from linrec.config import Caps, settings
from linrec.core.algebra import DEFAULT_FAMILY, AlgebraFamily
from linrec.core.checker import Derivation, annotate_tiers, check, recursion_depth
from linrec.core.evaluator import explore, iter_redexes, step
from linrec.core.graph import InteractionGraph, build_graph, graph_size
from linrec.core.semantics import (
    LabelKey,
    Saturation,
    SemTree,
    Stack,
    enumerate_trees,
)
from linrec.core.subsystems import ContractionClass, Subsystem
from linrec.core.terms import Term
from linrec.core.types import HOLE, Base, Type, hole_base

logger = logging.getLogger(__name__)


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


def decide(missing: bool, exhaustive: bool) -> Verdict:
    """A miss only counts when nothing was cut off; a clean run only when everything was seen."""
    if missing:
        return Verdict.FAIL if exhaustive else Verdict.INCONCLUSIVE
    return Verdict.PASS if exhaustive else Verdict.INCONCLUSIVE


def combine(verdicts: Iterable[Verdict]) -> Verdict:
    seen = set(verdicts)
    if Verdict.FAIL in seen:
        return Verdict.FAIL
    return Verdict.INCONCLUSIVE if Verdict.INCONCLUSIVE in seen else Verdict.PASS


class CompletenessReport(BaseModel):
    verdict: Verdict
    arguments: list[str] = Field(default_factory=list)
    tree_terms: list[str] = Field(default_factory=list)
    missing: list[str] = Field(default_factory=list)
    reducts_exhaustive: bool = True
    trees_exhaustive: bool = True


class PreservationReport(BaseModel):
    verdict: Verdict
    note: str = ""
    source_terms: list[str] = Field(default_factory=list)
    reduct_terms: list[str] = Field(default_factory=list)
    missing: list[str] = Field(default_factory=list)


class LemmaResult(BaseModel):
    name: str
    verdict: Verdict
    violations: list[str] = Field(default_factory=list)


class StructuralReport(BaseModel):
    trees: int
    exhaustive: bool
    results: list[LemmaResult]

    @property
    def verdict(self) -> Verdict:
        return combine(r.verdict for r in self.results)

    def violations(self) -> list[str]:
        return [f"{r.name}: {v}" for r in self.results for v in r.violations]


def _sorted_text(items: Iterable[object]) -> list[str]:
    return sorted({str(i) for i in items}, key=lambda s: (len(s), s))


# ---- correctness instruments ----


def completeness_check(
    m: Term, d: Derivation, caps: Caps | None = None
) -> CompletenessReport:
    """Every data argument of a redex in a reduct of m is the root term of some tree of the interaction graph of d."""
    caps = caps or settings.caps
    ex = explore(m, caps)
    sat = enumerate_trees(build_graph(d), caps)
    known = sat.terms()
    missing = [t for t in ex.arguments if t not in known]
    # every argument found is a real one, so a miss is final once the tree set is
    verdict = decide(True, sat.exhaustive) if missing else decide(False, ex.exhaustive and sat.exhaustive)
    logger.info("completeness: %d arguments, %d tree terms, %d missing", len(ex.arguments), len(known), len(missing))
    return CompletenessReport(
        verdict=verdict,
        arguments=_sorted_text(ex.arguments),
        tree_terms=_sorted_text(known),
        missing=_sorted_text(missing),
        reducts_exhaustive=ex.exhaustive,
        trees_exhaustive=sat.exhaustive,
    )


def preservation_check(
    m: Term,
    n: Term,
    system: Subsystem,
    *,
    context: Mapping[str, Type] | None = None,
    expected: Type | None = None,
    family: AlgebraFamily = DEFAULT_FAMILY,
    caps: Caps | None = None,
) -> PreservationReport:
    """Root terms of the reduct's graph are among the root terms of the source graph."""
    caps = caps or settings.caps
    source = check(context, m, expected, system, family)
    reduct = check(context, n, source.type, system, family)
    before = enumerate_trees(build_graph(source), caps)
    after = enumerate_trees(build_graph(reduct), caps)
    known = before.terms()
    missing = [t for t in after.terms() if t not in known]
    return PreservationReport(
        verdict=decide(bool(missing), before.exhaustive and after.exhaustive),
        source_terms=_sorted_text(known),
        reduct_terms=_sorted_text(after.terms()),
        missing=_sorted_text(missing),
    )


def preservation_along(
    m: Term,
    system: Subsystem,
    *,
    family: AlgebraFamily = DEFAULT_FAMILY,
    caps: Caps | None = None,
    max_steps: int | None = None,
) -> list[PreservationReport]:
    """Backward preservation across each step of the deterministic reduction of a closed m.

    Runs to the normal form, at most `max_steps` steps (default `caps.max_steps`). A run cut short
    ends with an inconclusive entry.
    """
    caps = caps or settings.caps
    limit = caps.max_steps if max_steps is None else max_steps
    current = annotate_tiers(check(None, m, None, system, family))
    reports: list[PreservationReport] = []
    while (r := next(iter_redexes(current), None)) is not None:
        if len(reports) == limit:
            logger.warning("preservation stopped after %d steps before the normal form", limit)
            reports.append(
                PreservationReport(verdict=Verdict.INCONCLUSIVE, note=f"stopped after {limit} steps")
            )
            break
        following = step(current, r)
        reports.append(preservation_check(current, following, system, family=family, caps=caps))
        current = following
    return reports


# ---- structural lemmas ----


def _stack_problems(g: InteractionGraph, key: LabelKey, sat: Saturation | None) -> list[str]:
    edge, stack, _ = key
    box = g.edge_box.get(edge)
    if not stack:
        return [] if box is None else [f"e{edge} lies in the box of v{box} but the stack is empty"]
    problems: list[str] = []
    if box != stack[0].vertex:
        problems.append(f"e{edge}: innermost entry names v{stack[0].vertex}, the edge is in box {box}")
    for i, entry in enumerate(stack):
        outer = g.vertex_box.get(entry.vertex)
        expected = stack[i + 1].vertex if i + 1 < len(stack) else None
        if outer != expected:
            problems.append(f"v{entry.vertex} is nested in {outer}, the stack says {expected}")
        if sat is not None:
            scrutinee = sat.lookup(g.recursive_premise(entry.vertex), stack[i + 1 :], HOLE)
            if scrutinee is None or scrutinee.term != entry.whole:
                if sat.exhaustive:
                    problems.append(f"no scrutinee tree carrying {entry.whole} for v{entry.vertex}")
    return problems


def check_legal_stack_structure(
    g: InteractionGraph, t: SemTree, sat: Saturation | None = None
) -> list[str]:
    """Every stack in t mirrors the box nesting of its edge; empty when all labels are legal."""
    problems: list[str] = []
    for node in t.nodes():
        problems += [f"{node.label}: {p}" for p in _stack_problems(g, node.label.key, sat)]
    return problems


def _at_most_power(n: int, k: int, x: int) -> bool:
    if k >= 2 and x >= n.bit_length():
        return True
    return n <= k**x


def stack_sets(sat: Saturation) -> dict[LabelKey, frozenset[Stack]]:
    # children always enter the table before their parents
    out: dict[LabelKey, frozenset[Stack]] = {}
    for key, tree in sat.trees.items():
        stacks = {tree.label.stack}
        for c in tree.children:
            stacks |= out.get(c.label.key, frozenset({c.label.stack}))
        out[key] = frozenset(stacks)
    return out


def _base_of(g: InteractionGraph, tree: SemTree) -> Base | None:
    return hole_base(g.edges[tree.label.edge].type, tree.label.focus)


def _monotone_violations(g: InteractionGraph, sat: Saturation) -> list[str]:
    parents: dict[LabelKey, set[LabelKey]] = defaultdict(set)
    for key, tree in sat.trees.items():
        for c in tree.children:
            parents[c.label.key].add(key)
    problems: list[str] = []
    for key, tree in sat.trees.items():
        stack = tree.label.stack
        base = _base_of(g, tree)
        if not stack or base is None:
            continue
        box_tier = g.edges[g.recursive_premise(stack[0].vertex)].type
        if not isinstance(box_tier, Base) or box_tier.tier > base.tier:
            continue
        seen: set[LabelKey] = set()
        todo = list(parents[key])
        while todo:
            up = todo.pop()
            if up in seen:
                continue
            seen.add(up)
            above = up[1]
            if len(above) < len(stack) or above[len(above) - len(stack) :] != stack:
                problems.append(f"{sat.trees[up].label} does not extend the stack of {tree.label}")
                break
            todo.extend(parents[up])
    return problems


def structural_report(
    sat: Saturation,
    d: Derivation,
    system: Subsystem,
    family: AlgebraFamily = DEFAULT_FAMILY,
) -> StructuralReport:
    """Run every structural lemma over every enumerated tree."""
    g = sat.graph
    size = graph_size(g)
    depth = recursion_depth(d)
    k = family.max_arity
    stacks = stack_sets(sat)

    uniqueness = [f"{a} and {b} share a root label" for a, b in sat.collisions]
    legal: list[str] = []
    guiding: list[str] = []
    lengths: list[str] = []
    closure: list[str] = []
    exponential: list[str] = []
    linear: list[str] = []
    for key, tree in sat.trees.items():
        legal += [f"{tree.label}: {p}" for p in _stack_problems(g, key, sat)]
        base = _base_of(g, tree)
        if base is None:
            guiding.append(f"{tree.label} is not a focus of e{tree.label.edge}")
        if len(tree.label.stack) > depth:
            lengths.append(f"{tree.label} has {len(tree.label.stack)} entries, recursion depth is {depth}")
        for c in tree.children:
            if sat.trees.get(c.label.key) != c:
                closure.append(f"subtree {c.label} of {tree.label} is not enumerated")
            if base is not None and _base_of(g, c) != base:
                guiding.append(f"{c.label} is guided differently from its parent {tree.label}")
        u = len(stacks[key])
        if not _at_most_power(tree.term.size, k, size * u):
            exponential.append(f"|{tree.term}| = {tree.term.size} exceeds {k}^({size}*{u})")
        if tree.term.size > size * u:
            linear.append(f"|{tree.term}| = {tree.term.size} exceeds {size}*{u}")

    ramified_words = system.ramified and system.contraction in (ContractionClass.WORDS, ContractionClass.EMPTY)

    def result(name: str, violations: list[str], *, applies: bool = True) -> LemmaResult:
        if not applies:
            return LemmaResult(name=name, verdict=Verdict.PASS)
        return LemmaResult(name=name, verdict=decide(bool(violations), True), violations=violations)

    results = [
        result("uniqueness", uniqueness),
        result("legal-stacks", legal),
        result("guiding-type", guiding),
        result("stack-length", lengths),
        result("subtree-closure", closure),
        result("label-size-exponential", exponential),
        result("label-size-linear", linear, applies=ramified_words),
        result("monotone-stacks", _monotone_violations(g, sat) if system.ramified else [], applies=system.ramified),
    ]
    report = StructuralReport(trees=len(sat), exhaustive=sat.exhaustive, results=results)
    if report.verdict is Verdict.FAIL:
        logger.warning("structural lemmas violated: %s", report.violations()[:5])
    return report


# ---- generated trees ----


def generated_by(sat: Saturation, stacks: Iterable[Stack]) -> set[LabelKey]:
    """Keys of the trees generated by a set of stacks."""
    pool = set(stacks)
    longest = max((len(s) for s in pool), default=0)
    tops = {s for s in pool if len(s) == longest}
    g = sat.graph
    memo: dict[LabelKey, bool] = {}
    sets = stack_sets(sat)

    def stack_ok(stack: Stack) -> bool:
        if stack in pool:
            return True
        for top in tops:
            cut = len(stack) - len(top)
            if cut <= 0 or stack[cut:] != top:
                continue
            if all(scrutinee_ok(stack, i) for i in range(cut)):
                return True
        return False

    def scrutinee_ok(stack: Stack, i: int) -> bool:
        entry = stack[i]
        tree = sat.lookup(g.recursive_premise(entry.vertex), stack[i + 1 :], HOLE)
        return tree is not None and tree.term == entry.whole and generated(tree.label.key)

    def generated(key: LabelKey) -> bool:
        if key not in memo:
            memo[key] = False
            memo[key] = all(stack_ok(s) for s in sets[key])
        return memo[key]

    return {key for key in sat.trees if generated(key)}
