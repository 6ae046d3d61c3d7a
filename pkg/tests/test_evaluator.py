"""Weak call-by-value reduction, instrumentation, reduct exploration and the diamond check."""

import pytest

from linrec.config import Caps
from linrec.core.algebra import encode_nat
from linrec.core.evaluator import (
    RedexKind,
    algebraic_potential_size,
    assert_base_normal,
    check_diamond,
    contract,
    explore,
    normalize,
    redexes,
    reducts,
)
from linrec.core.terms import Var, alpha_equal, as_algebraic
from linrec.errors import FuelExhausted, InvariantViolation
from tests.conftest import parse

PARALLEL = r"c1_C ((\x:C^0. x) c2_C) ((\y:C^0. y) c2_C)"


def test_beta_on_values_only():
    m = parse(r"(\x:U^0. x) 2")
    n, stats = normalize(m)
    assert as_algebraic(n) == encode_nat(2)
    assert stats.steps == 1 and stats.counts["beta"] == 1


def test_no_reduction_under_binders_or_in_branches():
    assert redexes(parse(r"\z:U^0. (\x:U^0. x) z")) == []
    assert redexes(parse(r"x {{(\z:U^0. z) 1, 2}}")) == []
    m = parse(r"\z:U^0. (\x:U^0. x) z")
    n, stats = normalize(m)
    assert n == m and stats.steps == 0


def test_argument_must_be_a_value():
    rs = redexes(parse(r"(\x:U^0. x) ((\y:U^0. y) 1)"))
    assert len(rs) == 1 and rs[0].path == (1,)


def test_conditional_and_recursive_contraction():
    assert contract(parse("c2_U {{f, g}}")) == Var("g")
    assert contract(parse("1 <<f, g>>")) == parse("f c2_U (c2_U <<f, g>>)")
    assert contract(parse("1 {{f, g}}")) == parse("f c2_U")


def test_redex_kinds_record_data_arguments():
    (r,) = redexes(parse("2 <<f, g>>"))
    assert r.kind is RedexKind.RECURSIVE
    assert r.data == encode_nat(2) and r.argument_size == 3


def test_leftmost_outermost_order():
    kinds = [r.path for r in redexes(parse(PARALLEL))]
    assert kinds == [(0, 1), (1,)]


def test_fuel():
    with pytest.raises(FuelExhausted) as info:
        normalize(parse("@Add 3 3"), fuel=2)
    assert info.value.stats.steps == 2
    assert info.value.diagnostic().code == "FuelExhausted"


def test_trace_sees_every_step():
    lines = []
    _, stats = normalize(parse("@UnAdd 1 1"), on_step=lines.append)
    assert len(lines) == stats.steps
    assert [line.index for line in lines] == list(range(1, stats.steps + 1))
    assert stats.counts["recursive"] == 2


def test_assert_base_normal():
    assert assert_base_normal(parse("@Add 2 3")) == encode_nat(5)
    with pytest.raises(InvariantViolation):
        assert_base_normal(Var("x"))


# ---- exploration ----


def test_explore_follows_every_choice():
    ex = explore(parse(PARALLEL))
    assert len(ex.states) == 4 and ex.exhaustive
    terms, exhaustive = reducts(parse(PARALLEL))
    assert exhaustive and any(alpha_equal(t, parse("c1_C c2_C c2_C")) for t in terms)


def test_exploration_caps():
    ex = explore(parse("@Add 3 3"), Caps(max_states=3))
    assert not ex.exhaustive
    assert len(ex.states) <= 3


def test_algebraic_potential():
    assert algebraic_potential_size(parse("@UnAdd 1 1")) == (2, True)
    assert algebraic_potential_size(parse(r"\x:U^0. x")) == (0, True)


@pytest.mark.parametrize("source", [PARALLEL, "@UnAdd 1 1", r"(\x:U^0. x) 2", "@Coerc 2"])
def test_diamond(source):
    report = check_diamond(parse(source))
    assert report.holds and report.exhaustive


@pytest.mark.slow
def test_diamond_through_duplication():
    report = check_diamond(parse("@Square 1"))
    assert report.holds and report.exhaustive, report.violations


def test_diamond_counts_divergent_pairs():
    assert check_diamond(parse(PARALLEL)).pairs_checked == 1
