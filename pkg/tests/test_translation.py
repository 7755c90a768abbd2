import pytest

from tsd_machine.common.errors import GraphError, TranslationError
from tsd_machine.machine import init_state
from tsd_machine.syntax import TypeEnv, parse
from tsd_machine.translation import translate, translate_program
from tsd_machine.tsd_types import INT, NodeTag, PortRef, term_size

from conftest import ALT_GRAPH, SIEVE


def _tags(graph) -> list[NodeTag]:
    return sorted((node.tag for node in graph.nodes()), key=lambda tag: tag.value)


def _follow_bang(graph, port: PortRef):
    """The node inside the value box an out-port points at."""
    bang = graph.peer(port)
    assert graph.tag(bang.node) is NodeTag.BANG
    return graph.node(graph.peer(PortRef.o(bang.node)).node)


def test_constants_are_boxed():
    result = translate(parse("1 + 2"))
    graph = result.graph
    assert graph.tag(result.root.node) is NodeTag.BINOP
    assert _follow_bang(graph, PortRef.o(result.root.node, 0)).value == 1
    assert _follow_bang(graph, PortRef.o(result.root.node, 1)).value == 2
    assert len(graph.boxes()) == 2
    assert graph.interface() == ([result.root], [])
    assert graph.well_formed() == []


def test_if_port_layout():
    result = translate(parse("if 1 then 2 else 3"))
    node = result.root.node
    assert _follow_bang(result.graph, PortRef.o(node, 0)).value == 1
    assert _follow_bang(result.graph, PortRef.o(node, 1)).value == 3
    assert _follow_bang(result.graph, PortRef.o(node, 2)).value == 2


def test_lambda_binds_its_variable():
    result = translate(parse("λx. x"))
    graph = result.graph
    lam = graph.peer(PortRef.o(result.root.node)).node
    assert graph.tag(lam) is NodeTag.LAM
    assert graph.peer(PortRef.o(lam)) == PortRef.i(lam, 0)
    assert graph.peer(PortRef.o(result.root.node)) == PortRef.i(lam, 1)


def test_unused_variable_is_weakened_and_shared_variable_is_contracted():
    unused = translate(parse("λx. 1")).graph
    assert [n.kind.fan_in for n in unused.nodes() if n.tag is NodeTag.CONTRACTION] == [0]
    shared = translate(parse("λx. x + x")).graph
    assert [n.kind.fan_in for n in shared.nodes() if n.tag is NodeTag.CONTRACTION] == [2]


def test_free_variables_of_a_box_go_through_doors():
    graph = translate(parse("λy. λx. y")).graph
    doors = [n for n in graph.nodes() if n.tag is NodeTag.QUERY]
    assert len(doors) == 1
    assert graph.box(doors[0].boundary).bang is not None
    assert graph.well_formed() == []


def test_primitives_become_their_nodes():
    assert NodeTag.MAKE_CELL in _tags(translate(parse("ref 1")).graph)
    tags = _tags(translate(parse(ALT_GRAPH)).graph)
    for tag in (NodeTag.LINK, NodeTag.DEREF, NodeTag.STEP, NodeTag.MAKE_CELL, NodeTag.BINOP):
        assert tag in tags


def test_partial_primitive_application_is_eta_expanded():
    graph = translate(parse("(+) 1")).graph
    assert NodeTag.LAM in _tags(graph)
    assert graph.well_formed() == []


def test_node_count_is_linear_in_term_size():
    ratios = []
    for n in (10, 50, 200):
        term = parse(" + ".join(["deref (ref 1)"] * n))
        ratios.append(translate(term).graph.node_count() / term_size(term))
    assert max(ratios) - min(ratios) < 0.5


def test_open_terms():
    with pytest.raises(GraphError, match="open-term"):
        translate(parse("x + 1"))
    result = translate(parse("x + 1"), TypeEnv.of({"x": INT}))
    assert not result.is_closed
    port = result.free_var_ports["x"]
    assert result.graph.peer(port) is None
    assert port in result.graph.interface()[1]
    share = result.graph.node(port.node)
    assert share.tag is NodeTag.CONTRACTION and len(share.ins) == 1
    with pytest.raises(GraphError, match="open-term"):
        init_state(result)


def test_translate_program_tags_the_failing_stage():
    with pytest.raises(TranslationError) as error:
        translate_program("1 +")
    assert error.value.stage == "parse"
    with pytest.raises(TranslationError) as error:
        translate_program("deref 1")
    assert error.value.stage == "typecheck"


def test_sieve_translates_to_a_well_formed_graph():
    result = translate_program(SIEVE)
    assert result.type == INT
    assert result.is_closed
    assert result.graph.well_formed() == []
    assert result.graph.cells() == []
