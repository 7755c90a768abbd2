import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsd_machine.common.errors import EvaluationError
from tsd_machine.oracle import (NetStore, ProgramGenerator, differential_check, failure_kind, generate_programs,
                                oracle_eval)
from tsd_machine.oracle.Oracle import Const, OpExpr, ReadCell, Select, arithmetic
from tsd_machine.syntax import parse, pretty, typecheck
from tsd_machine.tsd_types import INT, RunConfig, Stuck

from conftest import ALT, COMPOSITE, MAX_OF_CELLS, SIEVE, run_source


@pytest.mark.parametrize("opname, m, n, expected", [
    ("/", 7, 2, 3),
    ("/", -7, 2, -3),
    ("/", 7, -2, -3),
    ("%", -7, 2, -1),
    ("%", 7, -2, 1),
    ("<=", 3, 3, 1),
    ("<>", 3, 3, 0),
    ("&&", 2, 0, 0),
    ("||", 0, 5, 1),
])
def test_arithmetic(opname, m, n, expected):
    assert arithmetic(opname, m, n) == expected


def test_division_by_zero():
    with pytest.raises(EvaluationError, match="division by zero"):
        oracle_eval(parse("1 / 0"))


def test_store_steps_against_pre_step_values():
    store = NetStore()
    first = store.new(1, Const(value=1))
    second = store.new(0, Const(value=0))
    store.cells[first].dependency = OpExpr(opname="-", left=Const(value=1), right=ReadCell(cell=first))
    store.cells[second].dependency = OpExpr(opname="+", left=ReadCell(cell=first), right=ReadCell(cell=second))
    assert store.step() == 2
    assert store.values() == [0, 1]
    assert store.step() == 1
    assert store.values() == [1, 1]


def test_select_evaluates_both_branches():
    store = NetStore()
    cell = store.new(0, Const(value=0))
    expr = Select(cond=ReadCell(cell=cell), then=Const(value=1), otherwise=Const(value=2))
    assert store.evaluate(expr) == 2


def test_reference_values_of_the_examples():
    assert oracle_eval(parse(MAX_OF_CELLS)).observations == [1, 3, 3]
    assert oracle_eval(parse(ALT)).observations == [0, 1]
    assert oracle_eval(parse(COMPOSITE)).cell_history == [[0, 1], [1, 1]]
    assert oracle_eval(parse(SIEVE)).observations == [3, 2, 4, 3, 5, 0]


def test_recursion_and_fuel():
    assert oracle_eval(parse("let f = rec f. λn. if n then n + f (n - 1) else 0 in f 10")).observable == ("int", 55)
    with pytest.raises(EvaluationError, match="fuel"):
        oracle_eval(parse("let f = rec f. λn. f n in f 1"), fuel=1000)


@pytest.mark.parametrize("source", [MAX_OF_CELLS, ALT, COMPOSITE, SIEVE, "42", "ref 1", "λx. x", "link (ref 0) 1"])
def test_machine_agrees_on_examples(source):
    report = differential_check(parse(source))
    assert report.agree, report.mismatches


def test_failing_the_same_way_counts_as_agreement():
    report = differential_check(parse("1 / 0"))
    assert report.agree
    assert report.machine.startswith("stuck")
    looping = "let f = rec f. λn. f n + 1 in f 1"
    assert differential_check(parse(looping), RunConfig(fuel=5_000), oracle_fuel=1000).agree


def test_failing_differently_is_a_mismatch():
    report = differential_check(parse("1 / 0"), RunConfig(fuel=3))
    assert not report.agree
    assert report.mismatches == ["machine fuel, oracle division"]


def test_failure_kinds():
    assert failure_kind(run_source("42")) is None
    assert failure_kind(run_source("1 / 0")) == "division"
    assert failure_kind(run_source(MAX_OF_CELLS, fuel=5)) == "fuel"
    assert failure_kind(Stuck(diagnosis="application of a non-function")) == "stuck"


def test_step_result_convention_is_shared():
    assert differential_check(parse(MAX_OF_CELLS), RunConfig(step_returns_bool=True)).agree


def test_generator_is_deterministic():
    assert [pretty(t) for t in generate_programs(5, seed=3)] == [pretty(t) for t in generate_programs(5, seed=3)]


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(min_value=0, max_value=100_000))
def test_generated_programs_are_well_typed(seed):
    assert typecheck(ProgramGenerator(seed).program()) == INT


@pytest.mark.slow
@settings(max_examples=1000, deadline=None)
@given(seed=st.integers(min_value=0, max_value=100_000),
       depth=st.integers(min_value=3, max_value=6),
       cells=st.integers(min_value=1, max_value=6))
def test_machine_agrees_with_the_oracle(seed, depth, cells):
    term = ProgramGenerator(seed, depth, cells).program()
    report = differential_check(term, RunConfig(fuel=2_000_000))
    assert report.agree, f"{report.program}: {report.mismatches}"


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(min_value=0, max_value=100_000))
def test_recursive_programs_are_well_typed(seed):
    term = ProgramGenerator(seed).recursive_program()
    assert typecheck(term) == INT
    assert "rec" in pretty(term)


@pytest.mark.slow
@settings(max_examples=200, deadline=None)
@given(seed=st.integers(min_value=0, max_value=100_000), cells=st.integers(min_value=1, max_value=6))
def test_machine_agrees_with_the_oracle_on_recursive_programs(seed, cells):
    term = ProgramGenerator(seed, 5, cells).recursive_program()
    report = differential_check(term, RunConfig(fuel=2_000_000))
    assert report.agree, f"{report.program}: {report.mismatches}"


def test_recursive_generation_is_opt_in():
    plain = generate_programs(20, seed=5)
    recursive = generate_programs(20, seed=5, recursive=True)
    assert all("rec" in pretty(term) for term in recursive)
    assert [pretty(t) for t in plain] != [pretty(t) for t in recursive]
