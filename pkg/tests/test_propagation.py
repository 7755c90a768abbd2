import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsd_machine.common.errors import PropagationError
from tsd_machine.graph import Graph
from tsd_machine.propagation import commit, init_prop_tokens, propagate
from tsd_machine.tsd_types import Mode, NodeKind, NodeTag, PortRef, Schedule
from tsd_machine.validity import is_dataflow_environment

from conftest import ALT_GRAPH, COMPOSITE_GRAPH, SIEVE, state_before_step


@pytest.fixture(scope="module")
def composite_graph():
    return state_before_step(COMPOSITE_GRAPH).graph


def _values(report) -> list[tuple[int, int]]:
    return [(c.old, c.returned) for c in report.cells]


def test_switching_to_propagation_creates_one_token_per_cell():
    state = state_before_step(ALT_GRAPH)
    assert state.mode is Mode.PROPAGATE
    assert len(state.props) == 1
    assert state.props[0].origin == state.graph.cells()[0]
    assert len(state_before_step(COMPOSITE_GRAPH).props) == 2


def test_alt_computes_one_minus_its_value():
    graph = state_before_step(ALT_GRAPH).graph
    report = propagate(graph)
    assert _values(report) == [(1, 0)]
    assert report.updated_count == 1


def test_composite_reads_pre_step_values(composite_graph):
    graph = composite_graph.snapshot()
    report = propagate(graph)
    assert [c.returned for c in report.cells] == [0, 1]
    assert commit(graph, report) == 2
    assert [graph.node(cell).value for cell in graph.cells()] == [0, 1]
    assert [c.returned for c in propagate(graph).cells] == [1, 1]


def test_propagation_leaves_the_graph_untouched(composite_graph):
    graph = composite_graph.snapshot()
    before = graph.fingerprint()
    propagate(graph)
    assert graph.fingerprint() == before


def test_trace_lists_every_prop_transition(composite_graph):
    events = []
    report = propagate(composite_graph.snapshot(), trace=events)
    assert len(events) == report.total_transitions
    assert all(e.mode is Mode.PROPAGATE for e in events)
    cells = {f"cell {cell}" for cell in composite_graph.cells()}
    assert {e.token for e in events} == cells


@settings(max_examples=100, deadline=None)
@given(seed=st.integers())
def test_random_schedules_agree_with_round_robin(composite_graph, seed):
    reference = propagate(composite_graph.snapshot())
    assert propagate(composite_graph.snapshot(), Schedule(kind="rand", seed=seed)) == reference


def test_schedules_agree_on_the_sieve():
    graph = state_before_step(SIEVE).graph
    reference = propagate(graph.snapshot())
    assert propagate(graph.snapshot(), Schedule.parse("par:4")) == reference
    for seed in range(100):
        assert propagate(graph.snapshot(), Schedule(kind="rand", seed=seed)) == reference


def test_graph_without_cells_has_nothing_to_propagate():
    graph = Graph()
    assert init_prop_tokens(graph) == []
    assert propagate(graph).cells == []


def test_cell_without_dependency():
    graph = Graph()
    graph.add_node(NodeKind.cell(0))
    with pytest.raises(PropagationError, match="no dependency"):
        propagate(graph)


def test_token_leaving_the_dataflow_part_is_an_error():
    graph = Graph()
    cell = graph.add_node(NodeKind.cell(0))
    box = graph.new_box()
    bang = graph.add_bang(box)
    lam = graph.add_node(NodeKind.of(NodeTag.LAM), box)
    graph.connect(PortRef.o(bang), PortRef.i(lam, 1))
    graph.connect(PortRef.o(cell), PortRef.i(bang))
    with pytest.raises(PropagationError) as error:
        propagate(graph)
    assert "left the dataflow environment" in str(error.value)
    assert error.value.path[0].startswith("pass.bang.i0.up")
    assert error.value.path[-1].startswith("stuck@")


def _dependency_edges(graph) -> list[tuple[PortRef, PortRef]]:
    """Edges between dataflow operators below the cells, where a contraction may be inserted."""
    inner = (NodeTag.BINOP, NodeTag.IF, NodeTag.DEREF)
    edges = []
    for node in sorted(graph.nodes(), key=lambda n: n.id):
        if node.tag not in inner:
            continue
        for port in graph.out_ports(node.id):
            child = graph.peer(port)
            if child is not None and graph.tag(child.node) in inner + (NodeTag.CELL,):
                edges.append((port, child))
    return edges


@settings(max_examples=30, deadline=None)
@given(data=st.data())
def test_inserting_contractions_keeps_dataflow_environments(composite_graph, data):
    graph = composite_graph.snapshot()
    expected = _values(propagate(graph))
    edges = _dependency_edges(graph)
    chosen = data.draw(st.lists(st.sampled_from(edges), unique=True, max_size=len(edges)))
    for parent, child in chosen:
        graph.disconnect(parent)
        share = graph.add_node(NodeKind.contraction(1), graph.node(parent.node).box)
        graph.connect(parent, PortRef.i(share))
        graph.connect(PortRef.o(share), child)
    for cell in graph.cells():
        assert is_dataflow_environment(graph, graph.peer(PortRef.o(cell)))
    assert _values(propagate(graph)) == expected
