import pytest

from tsd_machine.common.errors import ValidityError
from tsd_machine.graph import Graph
from tsd_machine.machine import Machine, init_state
from tsd_machine.translation import translate_program
from tsd_machine.tsd_types import (Direction, FlagKind, Mode, NodeKind, NodeTag, PortRef, RewriteFlag, RunConfig,
                                   StackElem, TraceEvent, ValidateLevel)
from tsd_machine.validity import (check_trace, check_valid_graph, check_valid_state, dataflow_violations,
                                  find_cell_free_cycle, is_dataflow_environment)

from conftest import ALT, ALT_GRAPH, COMPOSITE_GRAPH, SIEVE, state_before_step


def _predicates(report) -> set[str]:
    return {v.predicate for v in report.violations}


def _const_box(graph: Graph, value: int) -> int:
    box = graph.new_box()
    bang = graph.add_bang(box)
    const = graph.add_node(NodeKind.const(value), box)
    graph.connect(PortRef.o(bang), PortRef.i(const))
    return bang


def test_translated_graphs_are_valid():
    assert check_valid_graph(translate_program(SIEVE).graph).passed


def test_states_at_a_step_are_valid():
    for source in (ALT_GRAPH, COMPOSITE_GRAPH, SIEVE):
        report = check_valid_state(state_before_step(source))
        assert report.passed, report.violations


def test_binder_outside_its_box():
    graph = Graph()
    lam = graph.add_node(NodeKind.of(NodeTag.LAM))
    graph.connect(PortRef.o(lam), PortRef.i(lam, 0))
    assert "graph.box-form" in _predicates(check_valid_graph(graph))


def test_cycle_without_a_cell():
    graph = Graph()
    first = graph.add_node(NodeKind.of(NodeTag.PEEK))
    second = graph.add_node(NodeKind.of(NodeTag.PEEK))
    graph.connect(PortRef.o(first), PortRef.i(second))
    graph.connect(PortRef.o(second), PortRef.i(first))
    assert find_cell_free_cycle(graph) == [first, second]
    assert "graph.cycle" in _predicates(check_valid_graph(graph))


def test_cycles_through_cells_are_feedback():
    graph = state_before_step(ALT_GRAPH).graph
    assert find_cell_free_cycle(graph) == []


def test_operator_over_two_constants_under_a_cell():
    graph = Graph()
    cell = graph.add_node(NodeKind.cell(0))
    add = graph.add_node(NodeKind.binop("+"))
    graph.connect(PortRef.o(cell), PortRef.i(add))
    graph.connect(PortRef.o(add, 0), PortRef.i(_const_box(graph, 1)))
    graph.connect(PortRef.o(add, 1), PortRef.i(_const_box(graph, 2)))
    report = check_valid_graph(graph)
    assert _predicates(report) == {"graph.dataflow"}
    assert "constant operands only" in report.violations[0].description


def test_contraction_feeding_a_box():
    graph = Graph()
    cell = graph.add_node(NodeKind.cell(0))
    add = graph.add_node(NodeKind.binop("+"))
    share = graph.add_node(NodeKind.contraction(1))
    deref = graph.add_node(NodeKind.of(NodeTag.DEREF))
    graph.connect(PortRef.o(cell), PortRef.i(add))
    graph.connect(PortRef.o(add, 0), PortRef.i(share))
    graph.connect(PortRef.o(share), PortRef.i(_const_box(graph, 1)))
    graph.connect(PortRef.o(add, 1), PortRef.i(deref))
    graph.connect(PortRef.o(deref), PortRef.i(cell))
    problems = dataflow_violations(graph, graph.peer(PortRef.o(cell)))
    assert len(problems) == 1 and "fused or copied" in problems[0]


def test_dataflow_environment_over_cells():
    graph = Graph()
    cell = graph.add_node(NodeKind.cell(0))
    add = graph.add_node(NodeKind.binop("-"))
    deref = graph.add_node(NodeKind.of(NodeTag.DEREF))
    graph.connect(PortRef.o(cell), PortRef.i(add))
    graph.connect(PortRef.o(add, 0), PortRef.i(_const_box(graph, 1)))
    graph.connect(PortRef.o(add, 1), PortRef.i(deref))
    graph.connect(PortRef.o(deref), PortRef.i(cell))
    assert is_dataflow_environment(graph, PortRef.i(add))
    assert check_valid_graph(graph).passed


def test_misplaced_flag():
    state = state_before_step(ALT_GRAPH)
    state.main.flag = RewriteFlag.of(FlagKind.APP)
    assert {"state.flag", "state.mode"} <= _predicates(check_valid_state(state))


def test_prop_tokens_outside_propagation():
    state = state_before_step(ALT_GRAPH)
    state.mode = Mode.CONSTRUCT
    state.main.flag = RewriteFlag.of(FlagKind.NONE)
    assert "state.props" in _predicates(check_valid_state(state, with_graph=False))


def test_run_raises_on_an_invalid_start():
    state = init_state(translate_program("1 + 2"))
    state.main.cstack = []
    with pytest.raises(ValidityError):
        Machine(RunConfig(validate_level=ValidateLevel.EVERY_STEP)).run(state)


def test_trace_checks():
    def event(seq, rule, mode=Mode.CONSTRUCT):
        return TraceEvent(seq=seq, mode=mode, rule_id=rule, node_kind="s", port="0.i0", direction="↑", flag="□",
                          cstack_depth=1, bstack_depth=0, graph_nodes=1)

    assert check_trace([event(0, "mode.sp"), event(1, "pass.cell.i0.up", Mode.PROPAGATE),
                        event(2, "mode.commit", Mode.PROPAGATE)]).passed
    assert "trace.commit" in _predicates(check_trace([event(0, "mode.commit", Mode.PROPAGATE)]))
    assert "trace.seq" in _predicates(check_trace([event(3, "pass.app.i0.up")]))
    assert "trace.mode" in _predicates(check_trace([event(0, "pass.cell.i0.up", Mode.PROPAGATE)]))


def _node_with(graph: Graph, tag: NodeTag):
    return next(node for node in graph.nodes() if node.tag is tag)


def _state_at(source: str, position: PortRef | None = None, direction: Direction = Direction.UP, cstack=None):
    state = init_state(translate_program(source))
    if position is not None:
        state.main.position = position
    state.main.direction = direction
    if cstack is not None:
        state.main.cstack = cstack
    return state


def test_extra_stack_element():
    state = _state_at("1 + 2")
    state.main.cstack.insert(0, StackElem.of_int(3))
    report = check_valid_state(state)
    assert _predicates(report) == {"state.history"}
    assert "not explained by the path" in report.violations[0].description


def test_going_down_with_a_star():
    assert "state.history" in _predicates(check_valid_state(_state_at("1 + 2", direction=Direction.DOWN)))


def test_box_stack_entry_off_the_path():
    state = _state_at("let x = 1 in x + x")
    share = _node_with(state.graph, NodeTag.CONTRACTION)
    state.main.bstack.append(PortRef.i(share.id, min(share.ins)))
    assert _predicates(check_valid_state(state)) == {"state.history"}


def test_token_on_an_auxiliary_door():
    state = _state_at("let y = 1 in λx. x + y")
    door = _node_with(state.graph, NodeTag.QUERY)
    state.main.position = PortRef.i(door.id)
    assert "state.position" in _predicates(check_valid_state(state, with_graph=False))


def test_token_inside_a_box():
    state = _state_at("λx. x + 1")
    add = _node_with(state.graph, NodeTag.BINOP)
    state.main.position = PortRef.i(add.id)
    report = check_valid_state(state, with_graph=False)
    assert "state.position" in _predicates(report)
    assert any("outermost ! door" in v.description for v in report.violations)


def test_returning_from_an_unevaluated_term():
    state = _state_at("peek 1", direction=Direction.DOWN, cstack=[StackElem.of_int(1)])
    report = check_valid_state(state)
    assert "state.evaluated" in _predicates(report)
    assert "state.history" not in _predicates(report)


def test_function_before_its_argument():
    state = _state_at("(λx. x) (peek 1)")
    app = _node_with(state.graph, NodeTag.APP)
    state.main.position = state.graph.peer(PortRef.o(app.id, 0))
    report = check_valid_state(state)
    assert _predicates(report) == {"state.evaluated"}


def test_recorded_runs_keep_a_consistent_stack_history():
    events = []
    Machine(RunConfig(), trace=events).run(init_state(translate_program(ALT)))
    assert check_trace(events).passed
    assert {e.token for e in events} > {"main"}
    assert all(e.token.startswith("cell ") for e in events if e.mode is Mode.PROPAGATE and e.rule_id != "mode.commit")

    main_at = next(i for i, e in enumerate(events) if e.token == "main" and i > 0)
    corrupted = list(events)
    corrupted[main_at] = events[main_at].model_copy(update={"cstack_depth": events[main_at].cstack_depth + 1})
    assert "trace.history" in _predicates(check_trace(corrupted))

    prop_at = next(i for i, e in enumerate(events) if e.token != "main")
    corrupted = list(events)
    corrupted[prop_at] = events[prop_at].model_copy(update={"cstack_depth": 2})
    assert "trace.history" in _predicates(check_trace(corrupted))
