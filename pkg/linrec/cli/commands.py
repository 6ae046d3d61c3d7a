"""Command handlers: one function per subcommand, all driven by an AnalysisRequest."""

import logging
import sys
from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, NonNegativeInt, PositiveInt, TypeAdapter, field_validator

from linrec.cli.reports import (
    CheckReport,
    EdgeRow,
    EvalReport,
    GraphReport,
    ParseReport,
    PrimrecReport,
    SystemRow,
    TreeRow,
    TreesReport,
    TypecheckReport,
    VertexRow,
)
from linrec.config import Caps, settings
from linrec.core.algebra import encode_nat
from linrec.core.audit import audit
from linrec.core.checker import Derivation, check, highest_tier, recursion_depth, render_derivation
from linrec.core.checks import (
    Verdict,
    combine,
    completeness_check,
    decide,
    preservation_along,
    structural_report,
)
from linrec.core.evaluator import TraceLine, check_diamond, normalize
from linrec.core.graph import build_graph, dump_graph, graph_size, to_dot
from linrec.core.parser import Program, parse_program, parse_term, parse_type
from linrec.core.primrec import compile_primrec, evaluate_primrec, parse_primrec
from linrec.core.semantics import dump_tree, enumerate_trees
from linrec.core.stdlib import build, resolve
from linrec.core.subsystems import Subsystem, SubsystemRegistry
from linrec.core.terms import Term, apply, free_vars, print_term, to_term
from linrec.core.types import print_type
from linrec.errors import InvariantViolation, ParseError

logger = logging.getLogger(__name__)


class Command(str, Enum):
    PARSE = "parse"
    TYPECHECK = "typecheck"
    EVAL = "eval"
    GRAPH = "graph"
    TREES = "trees"
    CHECK = "check"
    AUDIT = "audit"
    STDLIB = "stdlib"
    PRIMREC = "primrec"
    SYSTEMS = "systems"


class AnalysisRequest(BaseModel):
    command: Command
    source: str | None = None  # inline term, a path, or "-" for stdin
    system: str = "H(A)"
    caps: Caps = Field(default_factory=lambda: settings.caps)
    output: Literal["text", "json"] = "text"

    expected_type: str | None = None
    derivation: bool = False
    trace: bool = False
    fuel: PositiveInt | None = None
    dot: bool = False
    name: str | None = None
    expression: str | None = None
    arguments: list[str] = Field(default_factory=list)
    tier: NonNegativeInt = 0

    @field_validator("system")
    @classmethod
    def _known_system(cls, value: str) -> str:
        registry = SubsystemRegistry()
        if not registry.exists(value):
            raise ValueError(f"unknown subsystem {value!r}; choose one of {', '.join(s.id for s in registry.all())}")
        return value


@dataclass(frozen=True)
class Outcome:
    status: int
    output: str


STATUS = {Verdict.PASS: 0, Verdict.INCONCLUSIVE: 2, Verdict.FAIL: 3}


def read_source(source: str | None) -> str:
    if source is None:
        raise ParseError("no term given")
    if source == "-":
        return sys.stdin.read()
    path = Path(source)
    if len(source) < 4096 and path.is_file():
        return path.read_text()
    return source


def _program(req: AnalysisRequest) -> Program:
    return parse_program(read_source(req.source), resolver=resolve)


def _system(req: AnalysisRequest) -> Subsystem:
    return SubsystemRegistry().get(req.system)


def _derive(req: AnalysisRequest) -> tuple[Program, Subsystem, Derivation]:
    program = _program(req)
    system = _system(req)
    expected = parse_type(req.expected_type, program.family) if req.expected_type else None
    return program, system, check(None, program.term, expected, system, program.family)


def _emit(req: AnalysisRequest, report: BaseModel, text: str, status: int = 0) -> Outcome:
    if req.output == "json":
        return Outcome(status, report.model_dump_json(indent=2))
    return Outcome(status, text)


# ---- handlers ----


def do_parse(req: AnalysisRequest) -> Outcome:
    m = _program(req).term
    report = ParseReport(term=print_term(m), size=m.size, free=sorted(free_vars(m)))
    return _emit(req, report, report.term)


def do_typecheck(req: AnalysisRequest) -> Outcome:
    _, system, d = _derive(req)
    report = TypecheckReport(
        system=system.id,
        type=print_type(d.type),
        recursion_depth=recursion_depth(d),
        highest_tier=highest_tier(d),
        derivation=render_derivation(d) if req.derivation else None,
    )
    lines = [
        f"{print_term(d.subject)} : {report.type}",
        f"system {report.system}  R={report.recursion_depth}  I={report.highest_tier}",
    ]
    if report.derivation:
        lines.append(report.derivation)
    return _emit(req, report, "\n".join(lines))


def _run(req: AnalysisRequest, m: Term) -> tuple[EvalReport, list[str]]:
    trace: list[str] = []
    on_step: Callable[[TraceLine], None] | None = (lambda line: trace.append(str(line))) if req.trace else None
    n, stats = normalize(m, req.fuel or req.caps.fuel, on_step)
    return EvalReport.of(n, stats), trace


def do_eval(req: AnalysisRequest) -> Outcome:
    report, trace = _run(req, _program(req).term)
    return _emit(req, report, "\n".join([*trace, report.text()]))


def do_graph(req: AnalysisRequest) -> Outcome:
    _, _, d = _derive(req)
    g = build_graph(d)
    report = GraphReport(
        size=graph_size(g),
        vertices=[
            VertexRow(id=v.id, label=v.label, ports=dict(sorted(v.ports.items())), box=g.vertex_box.get(v.id))
            for v in sorted(g.vertices.values(), key=lambda v: v.id)
        ],
        edges=[
            EdgeRow(
                id=e.id,
                type=print_type(e.type),
                source=e.source,
                source_port=e.source_port,
                target=e.target,
                target_port=e.target_port,
                box=g.edge_box.get(e.id),
            )
            for e in sorted(g.edges.values(), key=lambda e: e.id)
        ],
    )
    return _emit(req, report, to_dot(g) if req.dot else dump_graph(g))


def do_trees(req: AnalysisRequest) -> Outcome:
    _, _, d = _derive(req)
    sat = enumerate_trees(build_graph(d), req.caps)
    report = TreesReport(
        trees=len(sat),
        exhaustive=sat.exhaustive,
        rows=[TreeRow(label=str(t.label), term=str(t.term), size=t.term.size, dump=dump_tree(t)) for t in sat],
    )
    summary = f"-- {report.trees} trees, {'exhaustive' if sat.exhaustive else 'capped'}"
    text = "\n\n".join([*(r.dump for r in report.rows), summary])
    return _emit(req, report, text, 0 if sat.exhaustive else 2)


def do_check(req: AnalysisRequest) -> Outcome:
    program, system, d = _derive(req)
    m = program.term
    completeness = completeness_check(m, d, req.caps)
    preservation = preservation_along(m, system, family=program.family, caps=req.caps)
    structural = structural_report(enumerate_trees(build_graph(d), req.caps), d, system, program.family)
    diamond = check_diamond(m, req.caps)
    verdicts = [
        completeness.verdict,
        *(p.verdict for p in preservation),
        structural.verdict,
        decide(not diamond.holds, diamond.exhaustive),
    ]
    verdict = combine(verdicts)
    report = CheckReport(
        completeness=completeness,
        preservation=preservation,
        structural=structural,
        diamond_pairs=diamond.pairs_checked,
        diamond_violations=diamond.violations,
        diamond_exhaustive=diamond.exhaustive,
        verdict=verdict,
    )
    lines = [f"completeness: {completeness.verdict.value}"]
    lines += [
        f"preservation step {i + 1}: {p.verdict.value}" + (f" ({p.note})" if p.note else "")
        for i, p in enumerate(preservation)
    ]
    lines += [f"{r.name}: {r.verdict.value}" for r in structural.results]
    lines += structural.violations()
    lines.append(f"diamond: {verdicts[-1].value} ({diamond.pairs_checked} pairs)")
    lines += diamond.violations
    lines.append(f"verdict: {verdict.value}")
    return _emit(req, report, "\n".join(lines), STATUS[verdict])


def do_audit(req: AnalysisRequest) -> Outcome:
    program = _program(req)
    report = audit(program.term, _system(req), req.caps, program.family)
    return Outcome(STATUS[report.verdict], report.model_dump_json(indent=2))


def do_stdlib(req: AnalysisRequest) -> Outcome:
    try:
        head = build(req.name or "", req.tier)
    except KeyError as exc:
        raise ParseError(exc.args[0]) from None
    args = [parse_term(a, resolver=resolve) for a in req.arguments]
    m = apply(head, *args)
    if not args:
        report = ParseReport(term=print_term(m), size=m.size, free=[])
        return _emit(req, report, report.term)
    report, trace = _run(req, m)
    return _emit(req, report, "\n".join([*trace, report.text()]))


def do_primrec(req: AnalysisRequest) -> Outcome:
    fn = parse_primrec(req.expression or "")
    try:
        numbers = [int(a) for a in req.arguments]
    except ValueError:
        raise ParseError(f"arguments must be natural numbers, got {req.arguments}") from None
    if len(numbers) != fn.arity or any(n < 0 for n in numbers):
        raise ParseError(f"{req.expression} takes {fn.arity} natural numbers, got {req.arguments}")
    m = apply(compile_primrec(fn), *(to_term(encode_nat(n)) for n in numbers))
    run, trace = _run(req, m)
    expected = evaluate_primrec(fn, numbers)
    if run.decoded != str(expected):
        raise InvariantViolation(f"compiled term gave {run.text()}, the scheme gives {expected}")
    report = PrimrecReport(**run.model_dump(), function=req.expression or "", arguments=numbers, expected=expected)
    return _emit(req, report, "\n".join([*trace, report.text()]))


def do_systems(req: AnalysisRequest) -> Outcome:
    rows = [SystemRow(**row) for row in SubsystemRegistry().list()]
    header = ("id", "contraction", "ramified", "characterizes")
    table = [header] + [(r.id, r.contraction, r.ramified, r.characterizes) for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(header))]
    text = "\n".join("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in table)
    if req.output == "json":
        return Outcome(0, TypeAdapter(list[SystemRow]).dump_json(rows, indent=2).decode())
    return Outcome(0, text)


HANDLERS: dict[Command, Callable[[AnalysisRequest], Outcome]] = {
    Command.PARSE: do_parse,
    Command.TYPECHECK: do_typecheck,
    Command.EVAL: do_eval,
    Command.GRAPH: do_graph,
    Command.TREES: do_trees,
    Command.CHECK: do_check,
    Command.AUDIT: do_audit,
    Command.STDLIB: do_stdlib,
    Command.PRIMREC: do_primrec,
    Command.SYSTEMS: do_systems,
}


def run(req: AnalysisRequest) -> Outcome:
    logger.debug("running %s", req.command.value)
    return HANDLERS[req.command](req)
