"""Interaction graphs: gadgets per rule, boxes, export and the size constant."""

import pytest

from linrec.core.checker import Derivation, Rule, check
from linrec.core.graph import (
    VertexKind,
    box_premise,
    build_graph,
    dump_graph,
    fit_graph_constant,
    graph_size,
    recursive_premise,
    to_dot,
)
from linrec.core.stdlib import BUILDERS, TYPABLE_IN
from linrec.core.types import Base
from linrec.errors import NonStandardDerivation, WrongLabel
from tests.conftest import parse, typed

U0 = Base("U", 0)


def test_identity_graph(systems):
    g = build_graph(typed(r"\x:U^0. x", systems["H(A)"]))
    kinds = sorted(v.kind.value for v in g.vertices.values())
    assert kinds == ["C", "I-o"]
    assert graph_size(g) == 2
    assert g.premises == {}


def test_open_term_gets_premise_vertices(systems):
    d = check({"x": U0}, parse("x"), None, systems["H(A)"])
    g = build_graph(d)
    assert set(g.premises) == {"x"}
    assert g.vertices[g.premises["x"]].kind is VertexKind.PREMISE
    assert graph_size(g) == 2


def test_weakening_and_contraction_vertices(systems):
    g = build_graph(typed(r"\x:U^0. \y:U^0. x", systems["H(A)"]))
    assert len(g.of_kind(VertexKind.WEAKENING)) == 1
    g = build_graph(typed(r"\x:U^0. \f:U^0 -o U^0 -o U^0. f x x", systems["H(A)"]))
    (x,) = g.of_kind(VertexKind.CONTRACTION)
    assert set(x.ports) == {"in", "left", "right"}


def test_edges_run_from_producer_to_consumer(systems):
    g = build_graph(typed("@UnAdd", systems["H(A)"]))
    for e in g.edges.values():
        assert e.source is not None and e.target is not None
        assert g.vertices[e.source].ports[e.source_port] == e.id
        assert g.vertices[e.target].ports[e.target_port] == e.id


# ---- boxes ----


def test_recursion_box(systems):
    g = build_graph(typed("@UnAdd", systems["H(A)"]))
    (rec,) = g.of_kind(VertexKind.RECURSION)
    (p,) = g.of_kind(VertexKind.BOX_PREMISE)
    assert p.variable == "y"
    assert box_premise(g, vertex=p.id) == rec.id
    assert g.vertex_branch[p.id] == 2
    scrutinee = recursive_premise(g, rec.id)
    assert box_premise(g, edge=scrutinee) is None
    inside = [e for e in g.edges if g.edge_box.get(e) == rec.id]
    assert inside and all(g.box_depth(e) == 1 for e in inside)


def test_recursive_premise_needs_a_recursion_vertex(systems):
    g = build_graph(typed("@UnAdd", systems["H(A)"]))
    (c,) = g.of_kind(VertexKind.CONCLUSION)
    with pytest.raises(WrongLabel):
        recursive_premise(g, c.id)
    with pytest.raises(ValueError):
        box_premise(g)


def test_requires_standard_form(systems):
    d = typed(r"\x:U^0. x", systems["H(A)"])
    weakened = Derivation(Rule.WEAKENING, (("z", U0),) + d.context, d.subject, d.type, (d,), variable="z")
    with pytest.raises(NonStandardDerivation):
        build_graph(weakened)


# ---- export ----


def test_dump_is_stable(systems):
    d = typed("@Add", systems["H(A)"])
    first, second = dump_graph(build_graph(d)), dump_graph(build_graph(d))
    assert first == second
    g = build_graph(d)
    assert len(first.splitlines()) == len(g.vertices) + len(g.edges)


def test_dot_draws_boxes_as_clusters(systems):
    dot = to_dot(build_graph(typed("@UnAdd", systems["H(A)"])))
    assert dot.startswith("digraph G {")
    assert dot.rstrip().endswith("}")
    assert "cluster_box" in dot
    assert "C^R(U)" in dot


# ---- size ----


@pytest.mark.parametrize("name", ["UnAdd", "Add", "Coerc", "Extract", "Leaves"])
def test_graph_is_linear_in_the_term(name, systems):
    d = typed(f"@{name}", systems["H(A)"])
    assert graph_size(build_graph(d)) <= 4 * d.subject.size


def test_fit_graph_constant():
    fit = fit_graph_constant([(2, 4), (4, 8), (10, 20)])
    assert fit.slope == pytest.approx(2.0)
    assert fit.max_ratio == pytest.approx(2.0)
    with pytest.raises(ValueError):
        fit_graph_constant([])


def test_numeral_graphs_grow_linearly(systems):
    sizes = [graph_size(build_graph(typed(str(n), systems["H(A)"], U0))) for n in range(1, 11)]
    steps = {b - a for a, b in zip(sizes, sizes[1:])}
    assert len(steps) == 1 and steps.pop() > 0
    fit = fit_graph_constant([(parse(str(n)).size, s) for n, s in zip(range(1, 11), sizes)])
    assert fit.slope > 0


def test_graph_constant_over_the_library(systems):
    samples = []
    for name in sorted(BUILDERS):
        if "H(A)" in TYPABLE_IN[name]:
            d = typed(f"@{name}", systems["H(A)"])
            samples.append((d.subject.size, graph_size(build_graph(d))))
    fit = fit_graph_constant(samples)
    assert len(samples) == len(BUILDERS)
    assert 0 < fit.slope <= fit.max_ratio
