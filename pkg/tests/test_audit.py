"""Bound audit: measurements, verdicts and stable JSON."""

import json

import pytest

from linrec.config import Caps
from linrec.core.audit import audit, bound_family, label_bound
from linrec.core.bounds import BoundValue, elementary_bound, polynomial_bound, primrec_bound
from linrec.core.checks import Verdict
from linrec.errors import UnboundVariable
from tests.conftest import parse

CHECK_NAMES = ["justification-steps", "justification-size", "label-size", "label-size-term"]


def test_bound_family(systems):
    assert [bound_family(systems[s]) for s in ("H(A)", "H(W)", "H(0)")] == ["primrec"] * 3
    assert bound_family(systems["RH(A)"]) == "elementary"
    assert bound_family(systems["RH(W)"]) == bound_family(systems["RH(0)"]) == "polynomial"


def test_label_bound_dispatch(systems):
    kw = dict(depth=1, tier=1, x=2, k=2, ceiling_bits=4096)
    assert label_bound(systems["H(0)"], **kw) == BoundValue.of(primrec_bound(1, 2, 1, 2))
    assert label_bound(systems["RH(A)"], **kw) == BoundValue.of(elementary_bound(1, 1, 2, 2))
    assert label_bound(systems["RH(0)"], **kw) == BoundValue.of(polynomial_bound(1, 1, 2, exponent="m"))


def test_label_bound_past_the_ceiling(systems):
    b = label_bound(systems["RH(A)"], depth=1, tier=3, x=6, k=2, ceiling_bits=256)
    assert b.exceeds_ceiling and b.bits == 256


def test_audit_unary_addition(systems, small_caps):
    report = audit(parse("@UnAdd 1 1"), systems["H(A)"], small_caps)
    assert report.verdict is Verdict.PASS
    assert report.family == "primrec"
    assert (report.recursion_depth, report.highest_tier, report.max_arity) == (1, 1, 2)
    assert report.steps == 6 and report.steps_exact
    assert report.algebraic_potential == 2
    assert report.reducts_exhaustive and report.trees_exhaustive
    assert report.generated_by_empty_stack
    assert [c.name for c in report.checks] == CHECK_NAMES
    assert all(c.verdict is Verdict.PASS for c in report.checks)
    assert report.graph_ratio == pytest.approx(report.graph_size / report.term_size, abs=1e-6)


def test_term_size_checks_are_informational(systems, small_caps):
    report = audit(parse("@Add 2 1"), systems["RH(0)"], small_caps)
    informational = {c.name for c in report.checks if c.informational}
    assert informational == {"label-size-term", "label-size-printed-exponent"}
    assert report.family == "polynomial"


def test_audit_json_is_stable(systems, small_caps):
    first = audit(parse("@Coerc 2"), systems["H(0)"], small_caps).model_dump_json(indent=2)
    second = audit(parse("@Coerc 2"), systems["H(0)"], small_caps).model_dump_json(indent=2)
    assert first == second
    data = json.loads(first)
    assert data["subsystem"] == "H(0)"
    assert data["structural"]["results"][0]["name"] == "uniqueness"


def test_inconclusive_under_tight_caps(systems):
    report = audit(parse("@Add 3 2"), systems["H(A)"], Caps(max_states=3, max_trees=5))
    assert report.verdict is Verdict.INCONCLUSIVE
    assert not report.reducts_exhaustive and not report.trees_exhaustive


def test_audit_needs_a_closed_term(systems):
    with pytest.raises(UnboundVariable):
        audit(parse("x"), systems["H(A)"])


@pytest.mark.slow
@pytest.mark.parametrize(
    "source, sid",
    [("@Square 2", "RH(0)"), ("@Exp 2", "RH(A)"), ("@Leaves (@Blowup@1 2)", "H(A)")],
)
def test_audit_passes_across_families(source, sid, systems, small_caps):
    report = audit(parse(source), systems[sid], small_caps)
    assert report.verdict is Verdict.PASS, [c for c in report.checks if c.verdict is not Verdict.PASS]


def _justification_holds(report) -> None:
    assert report.reducts_exhaustive and report.steps_exact
    checks = {c.name: c for c in report.checks}
    for name in ("justification-steps", "justification-size"):
        assert checks[name].verdict is Verdict.PASS, checks[name]


@pytest.mark.parametrize(
    "source",
    [r"(\x:U^0. x) 2", "@UnAdd 1 1", "@Coerc 2", "@Predecessor 3", "@Add 2 1"],
)
def test_justification_bounds_over_the_corpus(source, systems, small_caps):
    _justification_holds(audit(parse(source), systems["H(A)"], small_caps))


@pytest.mark.slow
@pytest.mark.parametrize("source", ["@Square 1", "@Exp 2", "@Leaves (@Blowup@1 2)"])
def test_justification_bounds_on_larger_terms(source, systems):
    _justification_holds(audit(parse(source), systems["H(A)"]))
