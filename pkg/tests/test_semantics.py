"""Context semantics: tree saturation, root values, stacks and the subtree locator."""

import pytest

from linrec.config import Caps
from linrec.core.algebra import HOLE_CONTEXT, decompositions, encode_nat
from linrec.core.graph import VertexKind, build_graph
from linrec.core.semantics import (
    dump_tree,
    enumerate_trees,
    guiding_type,
    legal_stacks,
    subtree_locator,
    tree_term,
)
from linrec.core.types import HOLE, Base
from linrec.errors import DecompositionMismatch
from tests.conftest import typed


def _root(sat):
    g = sat.graph
    return sat.lookup(g.conclusion_edge.id, (), HOLE)


@pytest.mark.parametrize(
    "source, value",
    [
        (r"(\x:U^0. x) 2", 2),
        ("@Predecessor 3", 2),
        ("@Coerc 2", 2),
        ("@UnAdd 2 1", 3),
        ("@Add 1 2", 3),
    ],
)
def test_root_tree_carries_the_normal_form(source, value, systems, small_caps):
    sat = enumerate_trees(build_graph(typed(source, systems["H(A)"])), small_caps)
    assert sat.exhaustive
    root = _root(sat)
    assert root is not None and tree_term(root) == encode_nat(value)


def test_constants_build_their_values(systems, small_caps):
    sat = enumerate_trees(build_graph(typed(r"(\x:U^0. x) 2", systems["H(A)"])), small_caps)
    assert {encode_nat(0), encode_nat(1), encode_nat(2)} <= sat.terms()
    assert not sat.collisions


def test_stacks_outside_boxes_are_empty(systems, small_caps):
    sat = enumerate_trees(build_graph(typed(r"(\x:U^0. x) 2", systems["H(A)"])), small_caps)
    assert legal_stacks(_root(sat)) == {()}


def test_recursion_pushes_one_entry_per_copy(systems, small_caps):
    g = build_graph(typed("@Coerc 2", systems["H(A)"]))
    sat = enumerate_trees(g, small_caps)
    (rec,) = g.of_kind(VertexKind.RECURSION)
    inner = [t for t in sat if t.label.stack]
    assert inner
    assert all(t.label.stack[0].vertex == rec.id for t in inner)
    assert all(len(t.label.stack) == 1 for t in inner)
    copies = {t.label.stack[0].whole for t in inner}
    assert copies == {encode_nat(2)}


def test_guiding_type(systems, small_caps):
    sat = enumerate_trees(build_graph(typed("@Coerc 2", systems["H(A)"])), small_caps)
    assert guiding_type(_root(sat), sat.graph) == Base("U", 0)


# ---- locator ----


def test_subtree_locator_follows_every_decomposition(systems, small_caps):
    sat = enumerate_trees(build_graph(typed(r"(\x:U^0. x) 2", systems["H(A)"])), small_caps)
    root = _root(sat)
    for u, s in decompositions(root.term):
        assert subtree_locator(root, u, s).term == s


def test_subtree_locator_rejects_a_wrong_split(systems, small_caps):
    sat = enumerate_trees(build_graph(typed(r"(\x:U^0. x) 2", systems["H(A)"])), small_caps)
    with pytest.raises(DecompositionMismatch):
        subtree_locator(_root(sat), HOLE_CONTEXT, encode_nat(1))


# ---- caps and output ----


def test_tree_cap_marks_the_run_partial(systems):
    g = build_graph(typed("@Add 2 2", systems["H(A)"]))
    sat = enumerate_trees(g, Caps(max_trees=1))
    assert not sat.exhaustive
    assert len(sat) == 1


def test_label_size_cap(systems):
    g = build_graph(typed(r"(\x:U^0. x) 2", systems["H(A)"]))
    sat = enumerate_trees(g, Caps(max_label_size=2))
    assert not sat.exhaustive
    assert all(t.term.size <= 2 for t in sat)


def test_dump_tree(systems, small_caps):
    sat = enumerate_trees(build_graph(typed(r"(\x:U^0. x) 2", systems["H(A)"])), small_caps)
    text = dump_tree(_root(sat))
    first = text.splitlines()[0]
    assert first.startswith("(c1_U (c1_U c2_U), e")
    assert len(text.splitlines()) >= 3
