"""Type checker: derivations, contraction classes, ramification and standard form."""

import pytest

from linrec.core.checker import (
    Derivation,
    Rule,
    annotate_tiers,
    check,
    highest_tier,
    is_standard_form,
    iter_nodes,
    recursion_depth,
    render_derivation,
    require_standard_form,
    standardize,
    validate_derivation,
)
from linrec.core.parser import parse_type
from linrec.core.stdlib import build
from linrec.core.subsystems import custom_subsystem
from linrec.core.terms import Cons, children, print_term
from linrec.core.types import Base, print_type
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
from tests.conftest import SYSTEM_IDS, parse, typed

SHARE_U = r"\x:U^0. \f:U^0 -o U^0 -o U^0. f x x"
SHARE_C = r"\x:C^0. c1_C x x"
LOW_RECURSION = r"\x:U^0. x <<\w:U^0. \z:U^0. c1_U z, c2_U>>"
HIGH_RECURSION = r"\x:U^1. x <<\w:U^1. \z:U^0. c1_U z, c2_U>>"
CAPTURING = r"\y:U^0. \x:U^1. x <<\w:U^1. \z:U^0. c1_U z, y>>"


@pytest.mark.parametrize("sid", SYSTEM_IDS)
def test_identity_types_everywhere(sid, systems):
    d = typed(r"\x:U^0. x", systems[sid])
    assert print_type(d.type) == "U^0 -o U^0"
    assert d.rule is Rule.ABSTRACTION


def test_contraction_node_is_placed_at_the_join(systems):
    d = typed(SHARE_U, systems["H(A)"])
    contractions = [n for n in iter_nodes(d) if n.rule is Rule.CONTRACTION]
    assert len(contractions) == 1
    node = contractions[0]
    assert node.variable == "x" and node.merged.startswith("x#")
    assert node.premises[0].rule is Rule.APPLICATION


def test_contraction_on_words(systems):
    assert typed(SHARE_U, systems["RH(W)"]).type is not None
    with pytest.raises(ContractionNotAllowed):
        typed(SHARE_U, systems["H(0)"])


def test_trees_are_not_words(systems):
    typed(SHARE_C, systems["H(A)"])
    with pytest.raises(ContractionNotAllowed) as info:
        typed(SHARE_C, systems["H(W)"])
    assert info.value.variable == "x"
    assert info.value.diagnostic().code == "ContractionNotAllowed"


def test_custom_contraction_predicate():
    only_trees = custom_subsystem(lambda t: isinstance(t, Base) and t.algebra == "C", ramified=False)
    assert typed(SHARE_C, only_trees).type is not None
    with pytest.raises(ContractionNotAllowed):
        typed(SHARE_U, only_trees)


def test_ramification(systems):
    typed(LOW_RECURSION, systems["H(A)"])
    with pytest.raises(RamificationViolation) as info:
        typed(LOW_RECURSION, systems["RH(A)"])
    assert (info.value.tier, info.value.level) == (0, 0)
    d = typed(HIGH_RECURSION, systems["RH(0)"])
    assert print_type(d.type) == "U^1 -o U^0"


def test_recursion_branches_only_capture_contractible_variables(systems):
    typed(CAPTURING, systems["H(W)"])
    with pytest.raises(RecursionContextViolation):
        typed(CAPTURING, systems["H(0)"])


@pytest.mark.parametrize(
    "source, error",
    [
        ("x", UnboundVariable),
        (r"\x:U^0. x {{c2_U}}", BranchArityMismatch),
        (r"(\x:U^0. x) b" + '"0"', TypeMismatch),
        ("c2_U", AmbiguousTier),
        (r"(\x:U^0. x) (\y:U^0. y)", TypeMismatch),
    ],
)
def test_errors(source, error, systems):
    with pytest.raises(error):
        typed(source, systems["H(A)"])


def test_explicit_tier_removes_ambiguity(systems):
    d = typed("c2_U@3", systems["H(A)"])
    assert d.type == Base("U", 3)


def test_checking_against_an_expected_type(systems):
    add = build("Add", 0)
    d = check(None, add, parse_type("U^1 -o U^0 -o U^0"), systems["RH(0)"])
    assert d.subject == add
    with pytest.raises(TypeMismatch):
        check(None, add, parse_type("U^0 -o U^0 -o U^0"), systems["RH(0)"])


def test_unused_context_entries_are_dropped(systems):
    d = check({"x": Base("U", 0), "y": Base("B", 1)}, parse("x"), None, systems["H(0)"])
    assert d.context_map == {"x": Base("U", 0)}


# ---- metrics ----


def _constants(m):
    if isinstance(m, Cons):
        yield m
    for c in children(m):
        yield from _constants(c)


def test_recursion_depth_and_highest_tier(systems):
    d = typed("@Add", systems["RH(0)"])
    assert (recursion_depth(d), highest_tier(d)) == (1, 1)
    d = typed(r"\x:U^0. x", systems["RH(0)"])
    assert (recursion_depth(d), highest_tier(d)) == (0, 0)
    d = typed("@Exp", systems["RH(A)"])
    assert recursion_depth(d) == 1
    assert highest_tier(d) == 2


def test_annotate_tiers_fills_every_constant(systems):
    d = typed("@UnAdd 1 1", systems["H(A)"])
    m = annotate_tiers(d)
    text = print_term(m)
    assert "c1_U@1 c2_U@1" in text
    assert "c1_U@0 c2_U@0" in text
    assert all(c.tier is not None for c in _constants(m))


# ---- standard form ----


@pytest.mark.parametrize("name", ["UnAdd", "Add", "Coerc", "Leaves", "Duplicate"])
def test_checker_output_is_standard_and_valid(name, systems):
    d = typed(f"@{name}", systems["H(A)"])
    assert is_standard_form(d)
    assert validate_derivation(d, systems["H(A)"]) == []
    assert standardize(d) == d
    assert standardize(standardize(d)) == standardize(d)


def test_validation_catches_a_disallowed_contraction(systems):
    d = typed(SHARE_U, systems["H(A)"])
    problems = validate_derivation(d, systems["H(0)"])
    assert any("contraction class" in p for p in problems)


def test_stray_weakening_is_not_standard(systems):
    d = typed(r"\x:U^0. x", systems["H(A)"])
    weakened = Derivation(
        Rule.WEAKENING, (("z", Base("U", 0)),) + d.context, d.subject, d.type, (d,), variable="z"
    )
    assert not is_standard_form(weakened)
    with pytest.raises(NonStandardDerivation):
        require_standard_form(weakened)
    assert standardize(weakened) == d


def test_render_derivation_lists_every_node(systems):
    d = typed(SHARE_U, systems["H(A)"])
    lines = render_derivation(d).splitlines()
    assert len(lines) == sum(1 for _ in iter_nodes(d))
    assert lines[0].startswith("[I-o]")
