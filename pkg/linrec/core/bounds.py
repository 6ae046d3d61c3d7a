"""Closed-form bound families over Python's arbitrary-precision integers.

Values grow as towers of exponentials. Every power goes through `_power`,
which refuses to materialize a value whose bit length provably exceeds the
ceiling and raises ResourceLimit instead; since every family is monotone,
a refused value is still known to be at least 2**ceiling.
"""

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from pydantic import BaseModel

from linrec.config import settings
from linrec.errors import ResourceLimit

Exponent = Literal["printed", "m"]


def _ceiling(ceiling_bits: int | None) -> int:
    return settings.BOUND_CEILING_BITS if ceiling_bits is None else ceiling_bits


def _power(base: int, exponent: int, ceiling_bits: int) -> int:
    if base >= 2 and exponent * (base.bit_length() - 1) > ceiling_bits:
        raise ResourceLimit(
            f"{base}^{exponent} has more than {ceiling_bits} bits", bits=exponent * (base.bit_length() - 1)
        )
    value = base**exponent
    if value.bit_length() > ceiling_bits:
        raise ResourceLimit(f"{base}^{exponent} has more than {ceiling_bits} bits", bits=value.bit_length())
    return value


@dataclass(frozen=True)
class Justification:
    s: int  # recursive redexes
    r: int  # growth per recursive redex
    q: int  # reduct size
    p: int  # steps


def justification_bounds(d: int, x: int, y: int, k: int) -> Justification:
    """Step and size bounds for a term of size x and algebraic potential y at recursion depth d."""
    s = x * y**d
    r = k * (y + x + x * y)
    q = x + s * x * y + s * r
    return Justification(s=s, r=r, q=q, p=s * x + s + q)


def primrec_bound(d: int, x: int, y: int, k: int, *, ceiling_bits: int | None = None) -> int:
    """p_d(x, y): label-size bound for trees generated by y stacks at remaining depth d."""
    ceiling = _ceiling(ceiling_bits)
    memo: dict[tuple[int, int], int] = {}

    def p(i: int, y: int) -> int:
        if (i, y) in memo:
            return memo[(i, y)]
        if i == 0:
            value = _power(k, x * y, ceiling)
        else:
            value = h(i, y, x * y)
        memo[(i, y)] = value
        return value

    def h(i: int, y: int, z: int) -> int:
        acc = _power(k, x * y, ceiling)
        for _ in range(z):
            acc += p(i - 1, y + acc)
            if acc.bit_length() > ceiling:
                raise ResourceLimit(f"h_{i} has more than {ceiling} bits", bits=acc.bit_length())
        return acc

    return p(d, y)


def primrec_step(i: int, x: int, y: int, z: int, k: int, *, ceiling_bits: int | None = None) -> int:
    """h_i(x, y, z), the accumulator the primitive recursive family is built from."""
    if i < 1:
        raise ValueError("h is defined from i = 1")
    ceiling = _ceiling(ceiling_bits)
    acc = _power(k, x * y, ceiling)
    for _ in range(z):
        acc += primrec_bound(i - 1, x, y + acc, k, ceiling_bits=ceiling)
    return acc


def elementary_bound(i: int, m: int, x: int, k: int, *, ceiling_bits: int | None = None) -> int:
    """A tower of i+1 exponentials in x."""
    ceiling = _ceiling(ceiling_bits)
    value = _power(k, x * x, ceiling)
    for _ in range(i):
        value = _power(k, x * (x * value) ** m, ceiling)
    return value


def polynomial_bound(i: int, m: int, x: int, *, exponent: Exponent = "printed") -> int:
    """x^2 unfolded i times through p -> x(x p)^e, where e is the step index or m."""
    value = x * x
    for n in range(i):
        value = x * (x * value) ** (n if exponent == "printed" else m)
    return value


def polynomial_degree_fit(i: int, m: int, xs: list[int] | None = None, *, exponent: Exponent = "m") -> float:
    """Slope of log p(x) against log x; constant in x exactly when p is polynomial."""
    xs = xs or [2**j for j in range(1, 21)]
    logs = np.array([math.log2(x) for x in xs])
    values = np.array([math.log2(polynomial_bound(i, m, x, exponent=exponent)) for x in xs])
    slope, _ = np.polyfit(logs, values, 1)
    return round(float(slope), 6)


class BoundValue(BaseModel):
    """A bound rendered for reports; `exact` is a decimal string or None past the ceiling."""

    exact: str | None
    bits: int
    exceeds_ceiling: bool = False

    @classmethod
    def of(cls, value: int) -> "BoundValue":
        return cls(exact=str(value), bits=value.bit_length())

    @classmethod
    def beyond(cls, ceiling_bits: int) -> "BoundValue":
        return cls(exact=None, bits=ceiling_bits, exceeds_ceiling=True)

    def dominates(self, measured: int) -> bool:
        if self.exceeds_ceiling:
            return measured.bit_length() <= self.bits
        assert self.exact is not None
        return measured <= int(self.exact)


def bound_value(compute, *args, ceiling_bits: int | None = None, **kwargs) -> BoundValue:
    """Evaluate a bound family, turning ResourceLimit into an over-the-ceiling value."""
    ceiling = _ceiling(ceiling_bits)
    try:
        return BoundValue.of(compute(*args, ceiling_bits=ceiling, **kwargs))
    except ResourceLimit:
        return BoundValue.beyond(ceiling)
