import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsd_machine.common.errors import GraphError
from tsd_machine.machine import (Machine, dataflow_pass, init_state, is_final, pass_step, restart_state, rewrite_step,
                                 run_program)
from tsd_machine.oracle import ProgramGenerator
from tsd_machine.translation import translate, translate_program
from tsd_machine.tsd_types import (Direction, FlagKind, Final, FuelExhausted, Mode, NodeKind, NodeTag, PortRef,
                                   RunConfig, Schedule, Stuck, ValidateLevel)
from tsd_machine.validity import check_trace

from conftest import ALT, COMPOSITE, MAX_OF_CELLS, SIEVE, SIEVE_STREAMS, run_source


def _history(outcome) -> list[list[int]]:
    return [[values[cell] for cell in sorted(values)] for values in outcome.cell_history]


def test_constant_program():
    outcome = run_source("42")
    assert isinstance(outcome, Final)
    assert outcome.value.value == 42
    assert outcome.observations == []
    assert is_final(outcome.state)


def test_initial_state():
    state = init_state(translate_program("1 + 2"))
    assert state.mode is Mode.CONSTRUCT
    assert state.props == []
    assert [str(e) for e in state.main.cstack] == ["⋆"]
    assert not is_final(state)


def test_pass_rules_move_the_token_and_leave_the_graph_alone():
    state = init_state(translate_program("1 + 2"))
    graph, token = state.graph, state.main
    before = graph.fingerprint()
    operator = token.position.node
    assert pass_step(graph, token) == "pass.binop.i0.up"
    assert token.position == graph.peer(PortRef.o(operator, 1))
    assert token.direction is Direction.UP
    assert dataflow_pass(token, graph) is None
    assert graph.fingerprint() == before


def test_operator_rewrite_folds_into_a_value_box():
    machine = Machine()
    state = init_state(translate_program("1 + 2"))
    while state.main.flag.kind is not FlagKind.OP:
        machine.step(state)
    assert rewrite_step(state) == "rw.op"
    assert [node.value for node in state.graph.nodes() if node.tag is NodeTag.CONST] == [3]
    assert machine.run(state).value.value == 3


def test_plain_arithmetic_and_functions():
    assert run_source("(λx. x * x) 7").value.value == 49
    assert run_source("let f = λx. λy. x - y in f 10 3").value.value == 7
    assert run_source("(-7) / 2").value.value == -3
    assert run_source("(-7) % 2").value.value == -1
    assert run_source("if 0 then 1 else 2").value.value == 2
    assert run_source("let fact = rec f. λn. if n then n * f (n - 1) else 1 in fact 5").value.value == 120


def test_max_of_cells_reads_initial_then_linked_values():
    outcome = run_source(MAX_OF_CELLS)
    assert isinstance(outcome, Final)
    assert outcome.observations == [1, 3, 3]
    assert outcome.step_counts == [2, 0]
    assert _history(outcome) == [[2, 3], [2, 3]]


def test_step_can_return_a_boolean():
    assert run_source(MAX_OF_CELLS, step_returns_bool=True).step_counts == [1, 0]


def test_alt_alternates():
    outcome = run_source(ALT)
    assert outcome.observations == [0, 1]
    assert outcome.step_counts == [1, 1]
    assert outcome.value.value == 1


def test_composite_cells_after_each_step():
    outcome = run_source(COMPOSITE)
    assert isinstance(outcome, Final)
    assert _history(outcome) == [[0, 1], [1, 1]]
    assert outcome.observations == [0, 1, 1, 1]


def test_sieve_primes():
    outcome = run_source(SIEVE)
    assert isinstance(outcome, Final)
    # every `next` peeks the input before the program peeks primes
    assert outcome.observations == [3, 2, 4, 3, 5, 0]
    assert outcome.observations[1::2] == [2, 3, 0]


def test_sieve_streams():
    observations = run_source(SIEVE_STREAMS).observations
    rows = [observations[:4]] + [observations[4 + 5 * r + 1: 4 + 5 * (r + 1)] for r in range(7)]
    inp, sieve, delay, primes = (list(column) for column in zip(*rows))
    assert inp == [2, 3, 4, 5, 6, 7, 8, 9]
    assert sieve == [1, 1, 1, 0, 1, 0, 1, 0]
    assert delay == [2, 2, 3, 4, 5, 6, 7, 8]
    assert primes == [2, 2, 3, 0, 5, 0, 7, 0]


def test_step_without_cells_updates_nothing():
    outcome = run_source("step")
    assert outcome.value.value == 0
    assert outcome.step_counts == [0]


def test_assign_writes_immediately():
    outcome = run_source("let c = ref 1 in assign c 5; peek (deref c)")
    assert outcome.observations == [5]


def test_root_reads_the_dependency():
    outcome = run_source("let c = ref 1 in let d = ref 0 in link d (deref c + 10); peek (root d)")
    assert outcome.observations == [11]


def test_fuel_exhaustion():
    outcome = run_source(MAX_OF_CELLS, fuel=5)
    assert isinstance(outcome, FuelExhausted)
    assert outcome.steps == 5


def test_division_by_zero_is_stuck():
    outcome = run_source("1 / 0")
    assert isinstance(outcome, Stuck)
    assert "division by zero" in outcome.diagnosis


def test_every_step_validation_holds_on_examples():
    for source in (MAX_OF_CELLS, ALT, COMPOSITE, SIEVE):
        assert isinstance(run_source(source, validate_level=ValidateLevel.EVERY_STEP), Final)


def test_rule_sequences_are_stable():
    for source in (MAX_OF_CELLS, ALT, COMPOSITE, SIEVE):
        first, second = [], []
        run_program(source, trace=first)
        run_program(source, trace=second)
        assert [e.rule_id for e in first] == [e.rule_id for e in second]
        assert check_trace(first).passed
        assert [e.seq for e in first] == list(range(len(first)))


def test_trace_counts_match_the_outcome():
    events = []
    outcome = run_program(MAX_OF_CELLS, trace=events)
    construct = [e for e in events if e.mode is Mode.CONSTRUCT]
    commits = [e for e in events if e.rule_id == "mode.commit"]
    assert len(construct) + len(commits) == outcome.steps
    assert len(events) - len(construct) - len(commits) == outcome.prop_transitions
    assert len(commits) == 2


RESTARTABLE = [ALT, COMPOSITE, SIEVE]


@settings(max_examples=30, deadline=None)
@given(source=st.sampled_from(RESTARTABLE), fraction=st.floats(min_value=0.0, max_value=0.99))
def test_restarting_on_an_intermediate_graph_reaches_the_same_observations(source, fraction):
    full = run_source(source)
    machine = Machine(RunConfig())
    state = init_state(translate_program(source))
    assert isinstance(machine.run(state, fuel=int(full.steps * fraction)), FuelExhausted)
    # a committed step keeps its `s` node until rw.s, so the cut waits for it
    while state.mode is Mode.PROPAGATE or state.main.flag.kind is FlagKind.STEP:
        machine.step(state)
    restarted = Machine(RunConfig()).run(restart_state(state.graph.snapshot()))
    assert isinstance(restarted, Final), getattr(restarted, "diagnosis", restarted)
    assert state.observations + restarted.observations == full.observations
    assert restarted.value.value == full.value.value


def test_restart_needs_a_single_root():
    graph = translate_program("1 + 2").graph
    graph.add_node(NodeKind.of(NodeTag.PEEK))
    with pytest.raises(GraphError):
        restart_state(graph)


@pytest.mark.slow
@settings(max_examples=1000, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_generated_programs_finish_safely(seed):
    term = ProgramGenerator(seed).program()
    outcome = Machine(RunConfig(fuel=2_000_000, validate_level=ValidateLevel.COMMIT)).run(init_state(translate(term)))
    assert isinstance(outcome, Final), getattr(outcome, "diagnosis", outcome)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(100))
def test_recursive_programs_never_get_stuck(seed):
    term = ProgramGenerator(seed).recursive_program()
    outcome = Machine(RunConfig(fuel=2_000_000)).run(init_state(translate(term)))
    assert isinstance(outcome, (Final, FuelExhausted)), getattr(outcome, "diagnosis", outcome)


@pytest.fixture(scope="module")
def sieve_reference():
    return run_source(SIEVE)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(100))
def test_sieve_under_random_schedules(sieve_reference, seed):
    outcome = run_source(SIEVE, schedule=Schedule(kind="rand", seed=seed))
    assert isinstance(outcome, Final)
    assert outcome.observations == sieve_reference.observations
    assert outcome.step_counts == sieve_reference.step_counts
    assert outcome.cell_history == sieve_reference.cell_history


def test_composite_under_a_parallel_schedule():
    reference = run_source(COMPOSITE)
    outcome = run_source(COMPOSITE, schedule=Schedule.parse("par:4"))
    assert isinstance(outcome, Final)
    assert _history(outcome) == [[0, 1], [1, 1]]
    assert outcome.observations == reference.observations
    assert outcome.step_counts == reference.step_counts
