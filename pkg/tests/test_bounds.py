"""Bound families: exact small values, monotonicity and the bit ceiling."""

import itertools

import pytest

from linrec.core.bounds import (
    BoundValue,
    bound_value,
    elementary_bound,
    justification_bounds,
    polynomial_bound,
    polynomial_degree_fit,
    primrec_bound,
    primrec_step,
)
from linrec.errors import ResourceLimit


def test_justification_values():
    assert justification_bounds(0, 7, 9, 2).s == 7
    assert justification_bounds(2, 5, 3, 2).s == 45
    j = justification_bounds(1, 3, 4, 2)
    assert j.r == 38
    assert j.q == 3 + j.s * 3 * 4 + j.s * j.r
    assert j.p == j.s * 3 + j.s + j.q


def test_primitive_recursive_family():
    assert primrec_bound(0, 2, 3, 2) == 64
    assert primrec_step(1, 2, 1, 1, 2) == 1028
    with pytest.raises(ValueError):
        primrec_step(0, 2, 1, 1, 2)


def test_elementary_family():
    assert elementary_bound(0, 3, 2, 2) == 16
    assert elementary_bound(1, 1, 2, 2) == 2**64


def test_polynomial_family():
    assert polynomial_bound(0, 4, 5) == 25
    assert polynomial_bound(1, 1, 2) == 2
    assert polynomial_bound(1, 1, 2, exponent="m") == 16


@pytest.mark.parametrize("x", [1, 2, 3, 4])
def test_monotone_in_the_size_argument(x):
    assert primrec_bound(0, x, 1, 2) <= primrec_bound(0, x + 1, 1, 2)
    assert polynomial_bound(2, 2, x, exponent="m") <= polynomial_bound(2, 2, x + 1, exponent="m")


def test_elementary_grows_with_size():
    assert elementary_bound(1, 1, 1, 2) <= elementary_bound(1, 1, 2, 2) <= elementary_bound(1, 1, 3, 2)


def test_monotone_in_depth():
    assert primrec_bound(0, 2, 1, 2) <= primrec_bound(1, 2, 1, 2)
    assert elementary_bound(0, 1, 3, 2) <= elementary_bound(1, 1, 3, 2)


def test_monotone_on_a_grid():
    for x, y in itertools.product(range(1, 11), repeat=2):
        assert primrec_bound(0, x, y, 2) <= primrec_bound(0, x + 1, y, 2)
        assert primrec_bound(0, x, y, 2) <= primrec_bound(0, x, y + 1, 2)
    for x, k in itertools.product(range(1, 51), (2, 3)):
        assert elementary_bound(0, 1, x, k) <= elementary_bound(0, 1, x + 1, k)
    for i, m, x in itertools.product(range(4), range(1, 4), range(1, 10)):
        assert polynomial_bound(i, m, x, exponent="m") <= polynomial_bound(i, m, x + 1, exponent="m")


# ---- ceiling ----


def test_towers_stop_at_the_ceiling():
    with pytest.raises(ResourceLimit) as info:
        elementary_bound(3, 1, 4, 2, ceiling_bits=64)
    assert info.value.diagnostic().code == "ResourceLimit"


def test_bound_value_past_the_ceiling():
    b = bound_value(elementary_bound, 3, 1, 4, 2, ceiling_bits=64)
    assert b.exceeds_ceiling and b.exact is None and b.bits == 64
    assert b.dominates(2**63)
    assert not b.dominates(2**64)


def test_bound_value_exact():
    b = bound_value(elementary_bound, 0, 1, 2, 2, ceiling_bits=64)
    assert b == BoundValue.of(16)
    assert b.dominates(16) and not b.dominates(17)


def test_degree_fit():
    assert polynomial_degree_fit(0, 1) == pytest.approx(2.0)
    assert polynomial_degree_fit(1, 1) == pytest.approx(4.0)
