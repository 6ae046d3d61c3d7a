"""Interaction graphs built from standard-form derivations.

Every rule instance becomes a small gadget:

    axiom      a bare edge, simultaneously conclusion and hypothesis
    W          a W vertex swallowing the hypothesis edge
    C          an X vertex: one incoming edge, two outgoing copies
    I-o        in: body; out: var, out
    E-o        in: fun, arg; out: out
    I_A        an I^c vertex with a single outgoing edge
    E^C        a C^N vertex; in: scrutinee, branch1..k; out: result
    E^R        a C^R vertex wired like C^N, plus a box around the branch
               subgraphs whose free hypotheses enter through P^R vertices

The root gets a C vertex on its conclusion and a P vertex per open
hypothesis. Edges carry their type and always point from the vertex that
produces the term to the vertex that consumes it.
"""

import itertools
from collections.abc import Iterable
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from linrec.core.algebra import Constructor
from linrec.core.checker import Derivation, Rule, require_standard_form
from linrec.core.terms import Abs
from linrec.core.types import Type, print_type
from linrec.errors import WrongLabel


class VertexKind(str, Enum):
    WEAKENING = "W"
    CONTRACTION = "X"
    ABSTRACTION = "I-o"
    APPLICATION = "E-o"
    PREMISE = "P"
    CONCLUSION = "C"
    CONDITIONAL = "C^N"
    BOX_PREMISE = "P^R"
    RECURSION = "C^R"
    CONSTANT = "I^c"


@dataclass
class Vertex:
    id: int
    kind: VertexKind
    algebra: str | None = None
    constructor: Constructor | None = None
    variable: str | None = None
    ports: dict[str, int] = field(default_factory=dict)  # role -> edge id

    @property
    def label(self) -> str:
        if self.kind is VertexKind.CONSTANT and self.constructor is not None:
            return f"I^c {self.constructor}"
        if self.algebra is not None:
            return f"{self.kind.value}({self.algebra})"
        if self.variable is not None:
            return f"{self.kind.value} {self.variable}"
        return self.kind.value

    def branch_port(self, i: int) -> int:
        return self.ports[f"branch{i}"]


@dataclass
class Edge:
    id: int
    type: Type
    source: int | None = None
    source_port: str = ""
    target: int | None = None
    target_port: str = ""


@dataclass
class InteractionGraph:
    vertices: dict[int, Vertex] = field(default_factory=dict)
    edges: dict[int, Edge] = field(default_factory=dict)
    vertex_box: dict[int, int] = field(default_factory=dict)
    edge_box: dict[int, int] = field(default_factory=dict)
    # for members of a box: which branch of the innermost C^R they were built for
    vertex_branch: dict[int, int] = field(default_factory=dict)
    conclusion: int = -1
    premises: dict[str, int] = field(default_factory=dict)  # variable -> P vertex

    @property
    def conclusion_edge(self) -> Edge:
        return self.edges[self.vertices[self.conclusion].ports["conclusion"]]

    def of_kind(self, kind: VertexKind) -> list[Vertex]:
        return [v for v in self.vertices.values() if v.kind is kind]

    def box_premise_of_edge(self, edge_id: int) -> int | None:
        return self.edge_box.get(edge_id)

    def box_premise_of_vertex(self, vertex_id: int) -> int | None:
        return self.vertex_box.get(vertex_id)

    def recursive_premise(self, vertex_id: int) -> int:
        """rho: the scrutinee edge entering a C^R vertex from outside its box."""
        v = self.vertices[vertex_id]
        if v.kind is not VertexKind.RECURSION:
            raise WrongLabel(f"vertex {vertex_id} is {v.kind.value}, not C^R")
        return v.ports["scrutinee"]

    def box_depth(self, edge_id: int) -> int:
        depth, box = 0, self.edge_box.get(edge_id)
        while box is not None:
            depth += 1
            box = self.vertex_box.get(box)
        return depth


def box_premise(
    g: InteractionGraph, *, edge: int | None = None, vertex: int | None = None
) -> int | None:
    """theta: the innermost C^R vertex whose box holds the edge or vertex, else None."""
    if edge is not None:
        return g.box_premise_of_edge(edge)
    if vertex is not None:
        return g.box_premise_of_vertex(vertex)
    raise ValueError("pass an edge or a vertex")


def recursive_premise(g: InteractionGraph, vertex: int) -> int:
    return g.recursive_premise(vertex)


def graph_size(g: InteractionGraph) -> int:
    return len(g.vertices)


@dataclass
class _Piece:
    conclusion: int  # edge id
    hyps: dict[str, int]  # variable -> edge id


class _Builder:
    def __init__(self) -> None:
        self.g = InteractionGraph()
        self._vids = itertools.count()
        self._eids = itertools.count()

    def vertex(self, kind: VertexKind, **kw) -> Vertex:
        v = Vertex(next(self._vids), kind, **kw)
        self.g.vertices[v.id] = v
        return v

    def edge(self, t: Type) -> Edge:
        e = Edge(next(self._eids), t)
        self.g.edges[e.id] = e
        return e

    def into(self, edge_id: int, v: Vertex, port: str) -> None:
        e = self.g.edges[edge_id]
        e.target, e.target_port = v.id, port
        v.ports[port] = edge_id

    def out_of(self, edge_id: int, v: Vertex, port: str) -> None:
        e = self.g.edges[edge_id]
        e.source, e.source_port = v.id, port
        v.ports[port] = edge_id

    def build(self, d: Derivation) -> _Piece:
        match d.rule:
            case Rule.AXIOM:
                e = self.edge(d.type)
                return _Piece(e.id, {d.variable: e.id})
            case Rule.WEAKENING:
                piece = self.build(d.premises[0])
                w = self.vertex(VertexKind.WEAKENING, variable=d.variable)
                h = self.edge(d.context_map[d.variable])
                self.into(h.id, w, "var")
                piece.hyps[d.variable] = h.id
                return piece
            case Rule.CONTRACTION:
                piece = self.build(d.premises[0])
                x = self.vertex(VertexKind.CONTRACTION, variable=d.variable)
                self.out_of(piece.hyps.pop(d.variable), x, "left")
                self.out_of(piece.hyps.pop(d.merged), x, "right")
                h = self.edge(d.context_map[d.variable])
                self.into(h.id, x, "in")
                piece.hyps[d.variable] = h.id
                return piece
            case Rule.ABSTRACTION:
                assert isinstance(d.subject, Abs)
                body = self.build(d.premises[0])
                lam = self.vertex(VertexKind.ABSTRACTION, variable=d.subject.binder)
                self.into(body.conclusion, lam, "body")
                self.out_of(body.hyps.pop(d.subject.binder), lam, "var")
                out = self.edge(d.type)
                self.out_of(out.id, lam, "out")
                return _Piece(out.id, body.hyps)
            case Rule.APPLICATION:
                fun = self.build(d.premises[0])
                arg = self.build(d.premises[1])
                app = self.vertex(VertexKind.APPLICATION)
                self.into(fun.conclusion, app, "fun")
                self.into(arg.conclusion, app, "arg")
                out = self.edge(d.type)
                self.out_of(out.id, app, "out")
                return _Piece(out.id, {**fun.hyps, **arg.hyps})
            case Rule.CONSTANT:
                c = d.subject.constructor
                v = self.vertex(VertexKind.CONSTANT, algebra=c.algebra, constructor=c)
                out = self.edge(d.type)
                self.out_of(out.id, v, "out")
                return _Piece(out.id, {})
            case Rule.CONDITIONAL:
                return self.eliminator(d, VertexKind.CONDITIONAL)
            case Rule.RECURSION:
                return self.eliminator(d, VertexKind.RECURSION)
        raise ValueError(f"unknown rule {d.rule}")

    def eliminator(self, d: Derivation, kind: VertexKind) -> _Piece:
        branches: list[_Piece] = []
        ranges: list[tuple[int, int, int, int]] = []
        for b in d.branches:
            v0, e0 = len(self.g.vertices), len(self.g.edges)
            branches.append(self.build(b))
            ranges.append((v0, len(self.g.vertices), e0, len(self.g.edges)))
        scrutinee = self.build(d.scrutinee)
        v = self.vertex(kind, algebra=d.algebra)
        self.into(scrutinee.conclusion, v, "scrutinee")
        for i, piece in enumerate(branches, start=1):
            self.into(piece.conclusion, v, f"branch{i}")
        out = self.edge(d.type)
        self.out_of(out.id, v, "result")

        hyps = dict(scrutinee.hyps)
        if kind is VertexKind.RECURSION:
            for i, (lo_v, hi_v, lo_e, hi_e) in enumerate(ranges, start=1):
                for vid in range(lo_v, hi_v):
                    if vid not in self.g.vertex_box:
                        self.g.vertex_box[vid] = v.id
                        self.g.vertex_branch[vid] = i
                for eid in range(lo_e, hi_e):
                    self.g.edge_box.setdefault(eid, v.id)
            for i, piece in enumerate(branches, start=1):
                for name, inner in sorted(piece.hyps.items()):
                    p = self.vertex(VertexKind.BOX_PREMISE, algebra=d.algebra, variable=name)
                    self.g.vertex_box[p.id] = v.id
                    self.g.vertex_branch[p.id] = i
                    self.out_of(inner, p, "inner")
                    outer = self.edge(self.g.edges[inner].type)
                    self.into(outer.id, p, "outer")
                    hyps[name] = outer.id
        else:
            for piece in branches:
                hyps.update(piece.hyps)
        return _Piece(out.id, hyps)

    def close(self, piece: _Piece) -> InteractionGraph:
        c = self.vertex(VertexKind.CONCLUSION)
        self.into(piece.conclusion, c, "conclusion")
        self.g.conclusion = c.id
        for name, edge_id in sorted(piece.hyps.items()):
            p = self.vertex(VertexKind.PREMISE, variable=name)
            self.out_of(edge_id, p, "hyp")
            self.g.premises[name] = p.id
        return self.g


def build_graph(d: Derivation) -> InteractionGraph:
    require_standard_form(d)
    b = _Builder()
    return b.close(b.build(d))


# ---- export ----


def to_dot(g: InteractionGraph, name: str = "G") -> str:
    children: dict[int | None, list[int]] = {}
    for vid in sorted(g.vertices):
        children.setdefault(g.vertex_box.get(vid), []).append(vid)

    lines = [f"digraph {name} {{", "  node [shape=box, fontname=monospace];"]

    def emit(box: int | None, indent: str) -> None:
        for vid in children.get(box, []):
            v = g.vertices[vid]
            lines.append(f'{indent}v{vid} [label="{v.label}"];')
        for vid in children.get(box, []):
            if g.vertices[vid].kind is VertexKind.RECURSION and vid in children:
                lines.append(f"{indent}subgraph cluster_box{vid} {{")
                lines.append(f'{indent}  label="box of v{vid}";')
                emit(vid, indent + "  ")
                lines.append(f"{indent}}}")

    emit(None, "  ")
    for e in sorted(g.edges.values(), key=lambda e: e.id):
        lines.append(f'  v{e.source} -> v{e.target} [label="e{e.id}: {print_type(e.type)}"];')
    lines.append("}")
    return "\n".join(lines)


def dump_graph(g: InteractionGraph) -> str:
    """One vertex or edge per line, stable across runs."""
    lines = []
    for vid in sorted(g.vertices):
        v = g.vertices[vid]
        ports = " ".join(f"{role}=e{eid}" for role, eid in sorted(v.ports.items()))
        box = g.vertex_box.get(vid)
        lines.append(f"v{vid} {v.label} [{ports}] box={'-' if box is None else f'v{box}'}")
    for eid in sorted(g.edges):
        e = g.edges[eid]
        box = g.edge_box.get(eid)
        lines.append(
            f"e{eid} {print_type(e.type)} v{e.source}.{e.source_port} -> v{e.target}.{e.target_port}"
            f" box={'-' if box is None else f'v{box}'}"
        )
    return "\n".join(lines)


# ---- size fit ----


@dataclass(frozen=True)
class GraphFit:
    slope: float  # least-squares c in |G| ~ c |M|
    max_ratio: float  # max |G| / |M| over the samples; a valid constant


def fit_graph_constant(samples: Iterable[tuple[int, int]]) -> GraphFit:
    """Fit |G| = c |M| through the origin over (|M|, |G|) pairs."""
    data = np.asarray(list(samples), dtype=float)
    if data.size == 0:
        raise ValueError("no samples to fit")
    x, y = data[:, 0:1], data[:, 1]
    slope, *_ = np.linalg.lstsq(x, y, rcond=None)
    return GraphFit(slope=round(float(slope[0]), 6), max_ratio=round(float(np.max(y / x[:, 0])), 6))
