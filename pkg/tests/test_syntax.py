import pytest

from tsd_machine.common.errors import TsdParseError, TsdTypeError
from tsd_machine.syntax import TypeEnv, infer_type, parse, pretty, typecheck
from tsd_machine.tsd_types import (CELL, INT, UNIT, App, IntLit, Lam, Op, UnitLit, Var, arrow, binop)

from conftest import ALT, COMPOSITE, MAX_OF_CELLS, SIEVE, SIEVE_STREAMS


def test_let_and_sequence_desugar_to_applications():
    assert parse("let x = 1 in x") == App(fn=Lam(name="x", body=Var(name="x")), arg=IntLit(value=1))
    assert parse("1; 2") == App(fn=Lam(name="_", body=IntLit(value=2)), arg=IntLit(value=1))


def test_infix_precedence():
    expected = binop("+", IntLit(value=1), binop("*", IntLit(value=2), IntLit(value=3)))
    assert parse("1 + 2 * 3") == expected
    assert parse("1 + 2 × 3") == expected
    assert parse("1 - 2 - 3") == binop("-", binop("-", IntLit(value=1), IntLit(value=2)), IntLit(value=3))


def test_surface_sugar():
    assert parse("λx. x") == parse("\\x. x")
    assert parse("true") == IntLit(value=1)
    assert parse("false") == IntLit(value=0)
    assert parse("()") == UnitLit()
    assert parse("(+)") == Op(opname="+")
    assert parse("(-4)") == IntLit(value=-4)
    assert parse("7 ÷ 2") == parse("7 / 2")
    assert parse("// the answer\n42") == IntLit(value=42)


def test_primitive_names_become_operators():
    assert parse("deref c") == App(fn=Op(opname="deref"), arg=Var(name="c"))
    assert parse("step") == Op(opname="step")


def test_parse_error_positions():
    with pytest.raises(TsdParseError) as error:
        parse("1\n+ +")
    assert error.value.line == 2

    with pytest.raises(TsdParseError):
        parse("let x = in 1")
    with pytest.raises(TsdParseError):
        parse("1 +")


@pytest.mark.parametrize("source", [MAX_OF_CELLS, ALT, COMPOSITE, SIEVE, SIEVE_STREAMS])
def test_pretty_reparses_to_the_same_term(source):
    term = parse(source)
    assert parse(pretty(term)) == term


def test_pretty_renders_let_and_negative_literals():
    assert pretty(parse("let x = (-1) in x; x")) == "let x = (-1) in x; x"


@pytest.mark.parametrize("source, expected", [
    ("ref 1", CELL),
    ("deref (ref 1)", INT),
    ("root (ref 1)", INT),
    ("link (ref 0) 1", UNIT),
    ("assign (ref 0) 1", UNIT),
    ("peek 3", INT),
    ("step", INT),
    ("λx:Cell. deref x", arrow(CELL, INT)),
    ("rec f. λn. if n then f (n - 1) else 0", arrow(INT, INT)),
])
def test_primitive_signatures(source, expected):
    assert typecheck(parse(source)) == expected


def test_unconstrained_variables_default_to_int():
    assert typecheck(parse("λx. x")) == arrow(INT, INT)


def test_infer_type_uses_the_environment():
    env = TypeEnv().extend("c", CELL).extend("f", arrow(INT, INT))
    assert infer_type(env, parse("f (deref c)")) == INT
    assert infer_type(env, parse("f")) == arrow(INT, INT)
    assert infer_type(env.extend("c", INT), parse("c + 1")) == INT
    with pytest.raises(TsdTypeError):
        infer_type(env, parse("c + 1"))


def test_example_programs_typecheck_without_annotations():
    for source in (MAX_OF_CELLS, ALT, COMPOSITE, SIEVE, SIEVE_STREAMS):
        assert typecheck(parse(source)) == INT


@pytest.mark.parametrize("source", [
    "deref 1",
    "1 2",
    "y",
    "if 1 then λx. x else λx. x",
    "if ref 0 then 1 else 2",
    "link (ref 0) (ref 1)",
])
def test_type_errors(source):
    with pytest.raises(TsdTypeError):
        typecheck(parse(source))


def test_type_error_names_the_subterm():
    with pytest.raises(TsdTypeError, match="unbound variable 'y'"):
        typecheck(parse("1 + y"))


# sieve.tsd before its typing fixes: `s` and `delay` read as integers, `i` unbound in `filter`
UNEDITED_SIEVE = """
let fromn = λn. let s = ref n in link s (s + 1); deref s in
let filter = λinp. λn. i == n || ((i % n) <> 0) in
let inp = fromn 2 in
let sieve = ref (filter inp 2) in
let next = λ_. step; link sieve (root sieve && (filter inp (peek inp))) in
let delay = ref inp in
let primes = if deref sieve then delay else 0 in
next 0; peek primes; // return 2
next 0; peek primes; // return 3
next 0; peek primes // return 0
"""


def test_unedited_sieve_parses_but_does_not_typecheck():
    term = parse(UNEDITED_SIEVE)
    assert "filter" in pretty(term)
    with pytest.raises(TsdTypeError):
        typecheck(term)
