"""Pass transitions: the token moves and its data changes, the graph does not."""
from tsd_machine.common.errors import StuckError
from tsd_machine.graph import Graph, describe_port
from tsd_machine.tsd_types import (LAM_VALUE, STAR, UNIT_VALUE, Direction, ElemKind, EvalToken, FlagKind, NodeTag,
                                   PortRef, RewriteFlag, StackElem, ValueTag)
from .DataflowRules import compute, dataflow_pass

UNARY = frozenset({NodeTag.PEEK, NodeTag.DEREF, NodeTag.ROOT, NodeTag.MAKE_CELL})


def rule_name(tag: NodeTag, port: PortRef, direction: Direction) -> str:
    port_name = f"{port.polarity.value}{port.index}" if tag is not NodeTag.CONTRACTION else f"{port.polarity.value}k"
    return f"pass.{tag.name.lower()}.{port_name}.{'up' if direction is Direction.UP else 'down'}"


def stuck(graph: Graph, token: EvalToken, reason: str) -> StuckError:
    stack = ":".join(str(e) for e in reversed(token.cstack[-4:]))
    return StuckError(f"{reason} at {describe_port(graph, token.position)} {token.direction} flag {token.flag} "
                      f"stack {stack or '□'}")


def move_up(graph: Graph, token: EvalToken, out_port: PortRef):
    """Send the token up the edge leaving `out_port`."""
    child = graph.peer(out_port)
    if child is None:
        raise stuck(graph, token, f"open edge at {out_port}")
    token.position = child
    token.direction = Direction.UP


def pop_int(graph: Graph, token: EvalToken, *tags: ValueTag) -> StackElem:
    top = token.top
    if top is None or not top.is_int or (tags and top.tag not in tags):
        raise stuck(graph, token, "expected an integer value")
    return token.cstack.pop()


def pass_step(graph: Graph, token: EvalToken) -> str:
    """
    Apply the pass transition matching the token, shared by main and prop tokens.
    Advances the token in place.
    :return: the rule id
    :raises StuckError: when no row matches
    """
    if not token.flag.is_none:
        raise stuck(graph, token, "pass rules need an empty flag")
    if token.direction is Direction.UP:
        return _up(graph, token)
    return _down(graph, token)


def _up(graph: Graph, token: EvalToken) -> str:
    port = token.position
    node = graph.node(port.node)
    tag = node.tag
    rule = rule_name(tag, port, Direction.UP)
    match tag:
        case NodeTag.LAM if port.index == 1:
            _reflect(graph, token, LAM_VALUE)
        case NodeTag.CONST:
            _reflect(graph, token, StackElem.of_int(node.value))
        case NodeTag.UNIT:
            _reflect(graph, token, UNIT_VALUE)
        case NodeTag.CELL:
            _reflect(graph, token, StackElem.cell_ref(node.value, port))
        case NodeTag.APP | NodeTag.BINOP | NodeTag.ASSIGN | NodeTag.LINK:
            move_up(graph, token, PortRef.o(node.id, 1))
        case _ if tag in UNARY:
            move_up(graph, token, PortRef.o(node.id))
        case NodeTag.IF:
            move_up(graph, token, PortRef.o(node.id))
        case NodeTag.REC if port.index == 1:
            token.flag = RewriteFlag.of(FlagKind.MU)
        case NodeTag.BANG:
            move_up(graph, token, PortRef.o(node.id))
            token.flag = RewriteFlag.of(FlagKind.BANG)
        case NodeTag.CONTRACTION:
            token.bstack.append(port)
            move_up(graph, token, PortRef.o(node.id))
            token.flag = RewriteFlag.of(FlagKind.CONTRACT)
        case _:
            raise stuck(graph, token, "no pass rule")
    return rule


def _reflect(graph: Graph, token: EvalToken, value: StackElem):
    if token.top is None or token.top.kind is not ElemKind.STAR:
        raise stuck(graph, token, "value nodes expect ⋆ on the stack")
    token.cstack[-1] = value
    token.direction = Direction.DOWN


def _down(graph: Graph, token: EvalToken) -> str:
    parent = graph.peer(token.position)
    if parent is None:
        raise stuck(graph, token, "token left the graph interface")
    node = graph.node(parent.node)
    tag = node.tag
    rule = dataflow_pass(token, graph)
    if rule is not None:
        return rule
    rule = rule_name(tag, parent, Direction.DOWN)
    here = PortRef.i(node.id)
    match tag, parent.index:
        case NodeTag.APP, 1:
            token.cstack[-1] = STAR
            move_up(graph, token, PortRef.o(node.id, 0))
        case NodeTag.APP, 0:
            if token.top is None or token.top.kind is not ElemKind.LAM:
                raise stuck(graph, token, "application of a non-function")
            token.cstack[-1] = STAR
            token.position, token.direction = here, Direction.UP
            token.flag = RewriteFlag.of(FlagKind.APP)
        case NodeTag.PEEK, 0:
            value = pop_int(graph, token, ValueTag.PLAIN, ValueTag.FLOW)
            _announce(token, here, RewriteFlag.of(FlagKind.PEEK), StackElem.of_int(value.value))
        case NodeTag.MAKE_CELL, 0:
            value = pop_int(graph, token, ValueTag.PLAIN, ValueTag.FLOW)
            _announce(token, here, RewriteFlag.of(FlagKind.MAKE_CELL), StackElem.of_int(value.value))
        case NodeTag.ROOT, 0:
            value = pop_int(graph, token, ValueTag.CELL)
            _announce(token, here, RewriteFlag.root(value.cell), StackElem.of_int(value.value))
        case (NodeTag.BINOP | NodeTag.ASSIGN | NodeTag.LINK), 1:
            token.cstack.append(STAR)
            move_up(graph, token, PortRef.o(node.id, 0))
        case NodeTag.BINOP, 0:
            left = pop_int(graph, token, ValueTag.PLAIN)
            right = pop_int(graph, token, ValueTag.PLAIN)
            result = compute(graph, token, node.opname, left.value, right.value)
            _announce(token, here, RewriteFlag.of(FlagKind.OP), StackElem.of_int(result))
        case NodeTag.ASSIGN, 0:
            cell = pop_int(graph, token, ValueTag.CELL)
            value = pop_int(graph, token, ValueTag.PLAIN, ValueTag.FLOW)
            _announce(token, here, RewriteFlag.assign(value.value, cell.cell), UNIT_VALUE)
        case NodeTag.LINK, 0:
            cell = pop_int(graph, token, ValueTag.CELL)
            pop_int(graph, token, ValueTag.PLAIN, ValueTag.FLOW)
            _announce(token, here, RewriteFlag.link(cell.cell), UNIT_VALUE)
        case NodeTag.IF, 0:
            condition = pop_int(graph, token, ValueTag.PLAIN)
            branch = 1 if condition.value == 0 else 2
            token.cstack.append(STAR)
            move_up(graph, token, PortRef.o(node.id, branch))
            token.flag = RewriteFlag.of(FlagKind.IF)
        case NodeTag.BANG, 0:
            token.position = here
        case NodeTag.CONTRACTION, 0:
            if not token.bstack or token.bstack[-1].node != node.id:
                raise stuck(graph, token, "box stack does not lead back through this contraction")
            token.position = token.bstack.pop()
        case _:
            raise stuck(graph, token, "no pass rule")
    return rule


def _announce(token: EvalToken, port: PortRef, flag: RewriteFlag, value: StackElem):
    token.cstack.append(value)
    token.position, token.direction, token.flag = port, Direction.DOWN, flag
