"""Report schemas printed by the command-line surface."""

from pydantic import BaseModel, Field

from linrec.core.algebra import AlgTerm, decode_binstring, decode_nat
from linrec.core.checks import CompletenessReport, PreservationReport, StructuralReport, Verdict
from linrec.core.evaluator import RunStats
from linrec.core.terms import Term, as_algebraic, print_term
from linrec.errors import DecodeError


def decode(t: AlgTerm) -> str:
    """Numbers for U, quoted bit strings for B, the term itself otherwise."""
    try:
        if t.algebra == "U":
            return str(decode_nat(t))
        if t.algebra == "B":
            return f'b"{decode_binstring(t)}"'
    except DecodeError:
        pass
    return str(t)


class ParseReport(BaseModel):
    term: str
    size: int
    free: list[str]


class TypecheckReport(BaseModel):
    system: str
    type: str
    recursion_depth: int
    highest_tier: int
    derivation: str | None = None


class EvalReport(BaseModel):
    result: str
    decoded: str | None
    steps: int
    max_term_size: int
    max_argument_size: int
    redexes: dict[str, int]

    @classmethod
    def of(cls, n: Term, stats: RunStats) -> "EvalReport":
        t = as_algebraic(n)
        return cls(
            result=print_term(n),
            decoded=decode(t) if t is not None else None,
            steps=stats.steps,
            max_term_size=stats.max_term_size,
            max_argument_size=stats.max_argument_size,
            redexes=dict(sorted(stats.counts.items())),
        )

    def text(self) -> str:
        return self.decoded if self.decoded is not None else self.result


class PrimrecReport(EvalReport):
    function: str
    arguments: list[int]
    expected: int


class VertexRow(BaseModel):
    id: int
    label: str
    ports: dict[str, int]
    box: int | None


class EdgeRow(BaseModel):
    id: int
    type: str
    source: int
    source_port: str
    target: int
    target_port: str
    box: int | None


class GraphReport(BaseModel):
    size: int
    vertices: list[VertexRow]
    edges: list[EdgeRow]


class TreeRow(BaseModel):
    label: str
    term: str
    size: int
    dump: str


class TreesReport(BaseModel):
    trees: int
    exhaustive: bool
    rows: list[TreeRow] = Field(default_factory=list)


class CheckReport(BaseModel):
    completeness: CompletenessReport
    preservation: list[PreservationReport]
    structural: StructuralReport
    diamond_pairs: int
    diamond_violations: list[str]
    diamond_exhaustive: bool
    verdict: Verdict


class SystemRow(BaseModel):
    id: str
    name: str
    contraction: str
    ramified: str
    characterizes: str
