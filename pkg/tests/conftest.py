"""Shared fixtures: the built-in algebras, the subsystem registry and small caps."""

import pytest

from linrec.config import Caps
from linrec.core.algebra import DEFAULT_FAMILY, AlgebraFamily, encode_nat
from linrec.core.checker import Derivation, check
from linrec.core.parser import parse_program
from linrec.core.stdlib import resolve
from linrec.core.subsystems import Subsystem, SubsystemRegistry
from linrec.core.terms import Term, to_term

SYSTEM_IDS = ["H(A)", "H(W)", "H(0)", "RH(A)", "RH(W)", "RH(0)"]


def parse(source: str) -> Term:
    return parse_program(source, resolver=resolve).term


def nat(n: int) -> Term:
    return to_term(encode_nat(n))


def typed(source: str, system: Subsystem, expected=None) -> Derivation:
    """Parse a closed term and check it in `system`."""
    program = parse_program(source, resolver=resolve)
    return check(None, program.term, expected, system, program.family)


@pytest.fixture
def family() -> AlgebraFamily:
    return DEFAULT_FAMILY


@pytest.fixture(scope="session")
def registry() -> SubsystemRegistry:
    return SubsystemRegistry()


@pytest.fixture(scope="session")
def systems(registry) -> dict[str, Subsystem]:
    return {sid: registry.get(sid) for sid in SYSTEM_IDS}


@pytest.fixture
def small_caps() -> Caps:
    return Caps(max_states=2_000, max_steps=500, max_trees=3_000, max_label_size=200, max_stack_depth=8)
