"""Concrete syntax: terms, types, preludes, builders and error positions."""

import pytest

from linrec.core.algebra import encode_binstring, encode_nat
from linrec.core.parser import parse_program, parse_term, parse_type
from linrec.core.stdlib import build, resolve
from linrec.core.terms import Abs, App, Cond, Cons, Rec, Var, alpha_equal, as_algebraic, print_term
from linrec.core.types import Arrow, Base
from linrec.errors import ParseError


def test_abstraction_and_application():
    m = parse_term(r"\x:U^0. \y:U^1. x y")
    assert isinstance(m, Abs) and m.annotation == Base("U", 0)
    body = m.body.body
    assert body == App(Var("x"), Var("y"))


def test_application_is_left_associative():
    m = parse_term("f a b")
    assert m == App(App(Var("f"), Var("a")), Var("b"))


def test_conditional_and_recursion_bind_the_whole_application():
    m = parse_term("f x {{a, b}}")
    assert isinstance(m, Cond) and m.scrutinee == App(Var("f"), Var("x"))
    r = parse_term("x <<a, b>>")
    assert isinstance(r, Rec) and len(r.branches) == 2


def test_numerals_and_bit_strings():
    assert as_algebraic(parse_term("3")) == encode_nat(3)
    assert as_algebraic(parse_term('b"0110"')) == encode_binstring("0110")


def test_constructor_tiers():
    m = parse_term("c1_U@2 c2_U")
    assert m.fun == Cons(m.fun.constructor, 2)
    assert m.arg.tier is None


def test_arrow_types_associate_to_the_right():
    t = parse_type("U^1 -o U^0 -o U^0")
    assert t == Arrow(Base("U", 1), Arrow(Base("U", 0), Base("U", 0)))
    assert parse_type("(U^0 -o U^0) -o C^2") == Arrow(Arrow(Base("U", 0), Base("U", 0)), Base("C", 2))


def test_builders_resolve_with_tiers():
    assert alpha_equal(parse_program("@Add@2", resolver=resolve).term, build("Add", 2))
    assert alpha_equal(parse_program("@Coerc", resolver=resolve).term, build("Coerc", 0))


def test_prelude_declares_algebras():
    program = parse_program("algebra T { c1/2, c2/1, c3/0 }\nc1_T c3_T (c2_T c3_T)")
    assert "T" in program.family
    assert program.family.max_arity == 2
    assert as_algebraic(program.term).size == 4


def test_comments_are_skipped():
    m = parse_term("-- the identity\n\\x:U^0. x")
    assert print_term(m) == r"\x:U^0. x"


def test_printing_reparses():
    m = build("Add", 1)
    assert alpha_equal(parse_term(print_term(m)), m)


# ---- errors ----


@pytest.mark.parametrize(
    "source",
    [
        r"\x:U^0 x",
        "(x",
        "c3_U",
        "@Nope",
        r"\c1_U:U^0. x",
        "c2_U {{a, b, c}}",
        "x y )",
    ],
)
def test_malformed_sources_raise(source):
    with pytest.raises(ParseError):
        parse_program(source, resolver=resolve)


def test_error_carries_position():
    with pytest.raises(ParseError) as info:
        parse_term("f\n  (x")
    assert info.value.line == 2
    assert info.value.diagnostic().code == "ParseError"


def test_prelude_constructors_must_be_numbered():
    with pytest.raises(ParseError):
        parse_program("algebra T { c2/0 } c1_T")


def test_builders_need_a_resolver():
    with pytest.raises(ParseError):
        parse_term("@Add")
