"""Rewrite transitions: the flagged redex at the token is replaced in the graph."""
import logging

from tsd_machine.common.errors import GraphError
from tsd_machine.graph import Graph
from tsd_machine.tsd_types import (STAR, UNIT_VALUE, Direction, EvalToken, FlagKind, MachineState, NodeKind, NodeTag,
                                   PortRef, RewriteFlag, StackElem, ValueTag)
from .DataflowRules import reset_operator_flag
from .PassRules import stuck

logger = logging.getLogger(__name__)

NO_FLAG = RewriteFlag.of(FlagKind.NONE)


def weaken(graph: Graph, port: PortRef):
    """
    Detach the value below an in-port that lost its consumer.
    Boxes are deleted, contraction inputs dropped, anything else (cells, dataflow nodes, unevaluated code)
    is capped with a weakening.
    """
    pending = [port]
    while pending:
        target = pending.pop()
        node = graph.node(target.node)
        if node.tag is NodeTag.BANG:
            pending.extend(graph.delete_subgraph([node.id]))
        elif node.tag is NodeTag.CONTRACTION:
            graph.remove_in_port(target)
            if node.ins:
                continue
            child = graph.peer(PortRef.o(node.id))
            if child is not None and graph.node(child.node).tag not in (NodeTag.BANG, NodeTag.CONTRACTION):
                continue  # the emptied contraction is itself the weakening
            if child is not None:
                graph.disconnect(PortRef.o(node.id))
                pending.append(child)
            graph.remove_node(node.id)
        else:
            region = node.boundary if node.tag is NodeTag.QUERY else node.box
            cap = graph.add_node(NodeKind.contraction(0), region)
            graph.connect(PortRef.o(cap), target)


def share_doors(graph: Graph, box: int, node_map: dict[int, int]):
    """Connect the doors of a box copy to the same outside values as the original's doors."""
    for door in sorted(graph.box(box).doors):
        target = graph.peer(PortRef.o(door))
        if target is None:
            continue
        copied = PortRef.o(node_map[door])
        if graph.node(target.node).tag is NodeTag.CONTRACTION:
            graph.connect(copied, graph.add_in_port(target.node))
            continue
        graph.disconnect(PortRef.o(door))
        share = graph.add_node(NodeKind.contraction(2), graph.node(door).box)
        graph.connect(PortRef.o(door), PortRef.i(share, 0))
        graph.connect(copied, PortRef.i(share, 1))
        graph.connect(PortRef.o(share), target)


def copy_shared_box(graph: Graph, box: int) -> PortRef:
    """Copy a box whose free variables stay shared with the original; returns the copy's principal in-port."""
    copy, node_map = graph.copy_box(box)
    share_doors(graph, box, node_map)
    return PortRef.i(graph.box(copy).bang)


def replace_with_value_box(graph: Graph, node_id: int, kind: NodeKind) -> PortRef:
    """Put a value box where a node with disconnected out-ports was; returns the box's principal in-port."""
    node = graph.node(node_id)
    parent = graph.peer(PortRef.i(node_id))
    if parent is not None:
        graph.disconnect(parent)
    region = node.box
    graph.remove_node(node_id)
    box = graph.new_box(region)
    bang = graph.add_bang(box)
    value = graph.add_node(kind, box)
    graph.connect(PortRef.o(bang), PortRef.i(value))
    graph.splice(parent, PortRef.i(bang))
    return PortRef.i(bang)


def _detach_operands(graph: Graph, node_id: int) -> list[PortRef]:
    return [graph.disconnect(port) for port in graph.out_ports(node_id) if graph.peer(port) is not None]


def _land(token: EvalToken, port: PortRef, direction: Direction):
    token.position, token.direction, token.flag = port, direction, NO_FLAG


def rewrite_step(state: MachineState) -> str:
    """
    Perform the rewrite announced by the main token's flag.
    :return: the rule id
    :raises StuckError: on a malformed redex
    """
    graph, token = state.graph, state.main
    try:
        match token.flag.kind:
            case FlagKind.APP:
                return _beta(graph, token)
            case FlagKind.IF:
                return _choose_branch(graph, token)
            case FlagKind.CONTRACT:
                return _contraction(graph, token)
            case FlagKind.BANG:
                token.flag = NO_FLAG
                return "rw.X-!"
            case FlagKind.MU:
                return _unfold(graph, token)
            case FlagKind.MAKE_CELL:
                return _make_cell(graph, token)
            case FlagKind.PEEK:
                return _peek(graph, token, state.observations)
            case FlagKind.ASSIGN:
                return _assign(graph, token)
            case FlagKind.LINK:
                return _link(graph, token)
            case FlagKind.ROOT:
                return _root(graph, token)
            case FlagKind.OP:
                return _operator(graph, token)
            case FlagKind.STEP:
                return _step(graph, token)
    except GraphError as e:
        raise stuck(graph, token, f"malformed redex ({e})") from e
    raise stuck(graph, token, "no rewrite rule")


def _beta(graph: Graph, token: EvalToken) -> str:
    app = token.position.node
    function = graph.peer(PortRef.o(app, 0))
    if function is None or graph.node(function.node).tag is not NodeTag.BANG:
        raise stuck(graph, token, "function is not a box")
    lam = graph.peer(PortRef.o(function.node))
    if lam is None or graph.node(lam.node).tag is not NodeTag.LAM:
        raise stuck(graph, token, "function box does not hold an abstraction")
    graph.open_box(graph.box_of_bang(function.node))
    lam = lam.node
    parent = graph.peer(PortRef.i(app))
    argument = graph.peer(PortRef.o(app, 1))
    variable = graph.peer(PortRef.i(lam, 0))
    body = graph.peer(PortRef.o(lam))
    for port in (PortRef.i(app), PortRef.o(app, 0), PortRef.o(app, 1), PortRef.i(lam, 0), PortRef.o(lam)):
        if graph.peer(port) is not None:
            graph.disconnect(port)
    graph.remove_node(app)
    graph.remove_node(lam)
    if variable == PortRef.o(lam):
        result = argument
    else:
        result = body
        user = graph.node(variable.node)
        if user.tag is NodeTag.CONTRACTION and not user.ins:
            graph.remove_node(user.id)
            weaken(graph, argument)
        else:
            graph.connect(variable, argument)
    graph.splice(parent, result)
    _land(token, result, Direction.UP)
    return "rw.beta"


def _choose_branch(graph: Graph, token: EvalToken) -> str:
    branch = graph.peer(token.position)
    node = branch.node
    if graph.node(node).tag is not NodeTag.IF or branch.index not in (1, 2):
        raise stuck(graph, token, "branch flag away from a conditional")
    parent = graph.peer(PortRef.i(node))
    if parent is not None:
        graph.disconnect(parent)
    condition = graph.disconnect(PortRef.o(node, 0))
    untaken = graph.disconnect(PortRef.o(node, 3 - branch.index))
    taken = graph.disconnect(PortRef.o(node, branch.index))
    graph.remove_node(node)
    graph.splice(parent, taken)
    weaken(graph, condition)
    weaken(graph, untaken)
    _land(token, taken, Direction.UP)
    return "rw.if"


def _contraction(graph: Graph, token: EvalToken) -> str:
    upper = graph.peer(token.position)
    share = graph.node(upper.node)
    child = graph.node(token.position.node)
    if share.tag is not NodeTag.CONTRACTION or not token.bstack or token.bstack[-1].node != share.id:
        raise stuck(graph, token, "contraction flag away from the contraction it was raised at")
    arrived = token.bstack[-1]
    if child.tag is NodeTag.CONTRACTION:
        # fuse the upper contraction into the lower one
        graph.disconnect(token.position)
        graph.remove_in_port(token.position)
        renamed = {}
        for index in list(share.ins):
            user = graph.peer(PortRef.i(share.id, index))
            fresh = graph.add_in_port(child.id)
            if user is not None:
                graph.disconnect(user)
                graph.connect(user, fresh)
            renamed[PortRef.i(share.id, index)] = fresh
        graph.remove_node(share.id)
        token.bstack = [renamed.get(entry, entry) for entry in token.bstack]
        token.position = graph.peer(PortRef.o(child.id))
        return "rw.Cc"
    if child.tag is not NodeTag.BANG:
        token.flag = NO_FLAG
        return "rw.C"
    user = graph.disconnect(arrived)
    if len(share.ins) == 1:
        graph.disconnect(token.position)
        graph.remove_in_port(arrived)
        graph.remove_node(share.id)
        target = PortRef.i(child.id)
        rule = "rw.C-!"
    else:
        graph.remove_in_port(arrived)
        target = copy_shared_box(graph, child.boundary)
        rule = "rw.delta"
    graph.connect(user, target)
    token.bstack.pop()
    _land(token, target, Direction.UP)
    return rule


def _unfold(graph: Graph, token: EvalToken) -> str:
    rec = token.position.node
    box = graph.node(rec).box
    if box is None or graph.peer(PortRef.o(graph.box(box).bang)) != token.position:
        raise stuck(graph, token, "recursion node outside its box")
    recursive_use = graph.peer(PortRef.i(rec, 0))
    user = graph.node(recursive_use.node)
    if user.tag is NodeTag.CONTRACTION and not user.ins:
        graph.disconnect(recursive_use)
        graph.remove_node(user.id)
    else:
        unfolded = copy_shared_box(graph, box)
        graph.disconnect(recursive_use)
        graph.connect(recursive_use, unfolded)
    graph.open_box(box)
    parent = graph.peer(PortRef.i(rec, 1))
    if parent is not None:
        graph.disconnect(parent)
    body = graph.disconnect(PortRef.o(rec))
    graph.remove_node(rec)
    graph.splice(parent, body)
    _land(token, body, Direction.UP)
    return "rw.mu"


def _make_cell(graph: Graph, token: EvalToken) -> str:
    maker = graph.node(token.position.node)
    value = token.top.value
    dependency = graph.disconnect(PortRef.o(maker.id))
    parent = graph.peer(PortRef.i(maker.id))
    if parent is not None:
        graph.disconnect(parent)
    region = maker.box
    graph.remove_node(maker.id)
    cell = graph.add_node(NodeKind.cell(value), region)
    graph.connect(PortRef.o(cell), dependency)
    graph.splice(parent, PortRef.i(cell))
    token.cstack[-1] = StackElem.cell_ref(value, PortRef.i(cell))
    _land(token, PortRef.i(cell), Direction.DOWN)
    logger.debug("created cell %d = %d", cell, value)
    return "rw.m"


def _peek(graph: Graph, token: EvalToken, observations: list[int]) -> str:
    value = token.top.value
    operands = _detach_operands(graph, token.position.node)
    result = replace_with_value_box(graph, token.position.node, NodeKind.const(value))
    for operand in operands:
        weaken(graph, operand)
    observations.append(value)
    _land(token, result, Direction.DOWN)
    return "rw.p"


def _cell_at(graph: Graph, token: EvalToken) -> int:
    cell = token.flag.cell
    if cell is None or not graph.has_node(cell.node) or graph.node(cell.node).tag is not NodeTag.CELL:
        raise stuck(graph, token, "flag does not point at a live cell")
    return cell.node


def _assign(graph: Graph, token: EvalToken) -> str:
    cell = _cell_at(graph, token)
    graph.set_value(cell, token.flag.value)
    operands = _detach_operands(graph, token.position.node)
    result = replace_with_value_box(graph, token.position.node, NodeKind.of(NodeTag.UNIT))
    for operand in operands:
        weaken(graph, operand)
    token.cstack[-1] = UNIT_VALUE
    _land(token, result, Direction.DOWN)
    return "rw.a"


def _link(graph: Graph, token: EvalToken) -> str:
    cell = _cell_at(graph, token)
    link = token.position.node
    old_dependency = graph.disconnect(PortRef.o(cell))
    graph.connect(PortRef.o(cell), graph.disconnect(PortRef.o(link, 1)))
    cell_operand = graph.disconnect(PortRef.o(link, 0))
    result = replace_with_value_box(graph, link, NodeKind.of(NodeTag.UNIT))
    weaken(graph, old_dependency)
    weaken(graph, cell_operand)
    token.cstack[-1] = UNIT_VALUE
    _land(token, result, Direction.DOWN)
    return "rw.l"


def _root(graph: Graph, token: EvalToken) -> str:
    cell = _cell_at(graph, token)
    root = token.position.node
    dependency = graph.peer(PortRef.o(cell))
    below = graph.node(dependency.node)
    if below.tag is NodeTag.CONTRACTION:
        shared = graph.add_in_port(below.id)
        rule = "rw.r"
    elif below.tag is NodeTag.BANG:
        shared = copy_shared_box(graph, below.boundary)
        rule = "rw.r'"
    else:
        graph.disconnect(PortRef.o(cell))
        share = graph.add_node(NodeKind.contraction(2), graph.node(cell).box)
        graph.connect(PortRef.o(cell), PortRef.i(share, 0))
        graph.connect(PortRef.o(share), dependency)
        shared = PortRef.i(share, 1)
        rule = "rw.r''"
    operand = graph.disconnect(PortRef.o(root))
    parent = graph.peer(PortRef.i(root))
    if parent is not None:
        graph.disconnect(parent)
    graph.remove_node(root)
    graph.splice(parent, shared)
    weaken(graph, operand)
    token.cstack[-1] = STAR
    _land(token, shared, Direction.UP)
    return rule


def _operator(graph: Graph, token: EvalToken) -> str:
    top = token.top
    if top is not None and top.is_int and top.tag is ValueTag.FLOW:
        return reset_operator_flag(token, graph)
    operands = _detach_operands(graph, token.position.node)
    result = replace_with_value_box(graph, token.position.node, NodeKind.const(top.value))
    for operand in operands:
        weaken(graph, operand)
    _land(token, result, Direction.DOWN)
    return "rw.op"


def _step(graph: Graph, token: EvalToken) -> str:
    count = token.top.value
    result = replace_with_value_box(graph, token.position.node, NodeKind.const(count))
    _land(token, result, Direction.DOWN)
    return "rw.s"
