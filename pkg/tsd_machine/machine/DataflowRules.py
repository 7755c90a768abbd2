"""
Dataflow rows: dereferencing, operators over flow values, both-branch conditionals.
They never modify the graph, so the same rows serve the main token and the prop tokens.
"""
import logging

from tsd_machine.common.errors import StuckError
from tsd_machine.common.utils import apply_binary_operator
from tsd_machine.graph import Graph, describe_port
from tsd_machine.tsd_types import (IF0, IF1, STAR, Direction, ElemKind, EvalToken, FlagKind, NodeTag, PortRef,
                                   RewriteFlag, StackElem, ValueTag)

logger = logging.getLogger(__name__)

_OPERAND_TAGS = (ValueTag.PLAIN, ValueTag.FLOW)


def compute(graph: Graph, token: EvalToken, opname: str, m: int, n: int) -> int:
    try:
        return apply_binary_operator(opname, m, n)
    except ZeroDivisionError:
        raise StuckError(f"division by zero in {m} {opname} {n} at {describe_port(graph, token.position)}") from None


def dataflow_pass(token: EvalToken, graph: Graph) -> str | None:
    """
    Apply the dataflow row matching a token travelling down, in place.
    :return: the rule id, or None when no dataflow row matches and the construct-mode rows decide
    """
    parent = graph.peer(token.position)
    if parent is None or token.direction is not Direction.DOWN or not token.flag.is_none:
        return None
    node = graph.node(parent.node)
    stack = token.cstack
    here = PortRef.i(node.id)
    match node.tag, parent.index:
        case NodeTag.DEREF, 0 if stack and stack[-1].is_int and stack[-1].tag is ValueTag.CELL:
            stack[-1] = StackElem.of_int(stack[-1].value, ValueTag.FLOW)
            token.position = here
            return "flow.d"
        case NodeTag.BINOP, 0 if _flow_operands(stack):
            left, right = stack.pop(), stack.pop()
            stack.append(StackElem.of_int(compute(graph, token, node.opname, left.value, right.value), ValueTag.FLOW))
            token.position, token.flag = here, RewriteFlag.of(FlagKind.OP)
            return "flow.op"
        case NodeTag.IF, 0 if stack and stack[-1].is_int and stack[-1].tag is ValueTag.FLOW:
            condition = stack.pop()
            stack.append(IF0 if condition.value == 0 else IF1)
            stack.append(STAR)
            _enter(graph, token, PortRef.o(node.id, 1))
            return "flow.if.cond0" if condition.value == 0 else "flow.if.cond1"
        case NodeTag.IF, 1:
            stack.append(STAR)
            _enter(graph, token, PortRef.o(node.id, 2))
            return "flow.if.o1"
        case NodeTag.IF, 2:
            if len(stack) < 3 or stack[-3].kind not in (ElemKind.IF0, ElemKind.IF1):
                raise StuckError(f"conditional selection without a marker at {describe_port(graph, parent)}")
            then_value, else_value, marker = stack.pop(), stack.pop(), stack.pop()
            # the zero marker keeps the value of o1 (else), the nonzero marker the value of o2 (then)
            selected = else_value if marker.kind is ElemKind.IF0 else then_value
            if selected.is_int and selected.tag is ValueTag.PLAIN:
                selected = StackElem.of_int(selected.value, ValueTag.FLOW)
            stack.append(selected)
            token.position = here
            return "flow.if.sel0" if marker.kind is ElemKind.IF0 else "flow.if.sel1"
    return None


def _flow_operands(stack: list[StackElem]) -> bool:
    if len(stack) < 2:
        return False
    left, right = stack[-1], stack[-2]
    if not (left.is_int and right.is_int and left.tag in _OPERAND_TAGS and right.tag in _OPERAND_TAGS):
        return False
    return ValueTag.FLOW in (left.tag, right.tag)


def _enter(graph: Graph, token: EvalToken, out_port: PortRef):
    child = graph.peer(out_port)
    if child is None:
        raise StuckError(f"open edge at {out_port}")
    token.position, token.direction = child, Direction.UP


def reset_operator_flag(token: EvalToken, graph: Graph) -> str:
    """The trailing `$` row: a flow result keeps its operator node, only the flag is cleared."""
    top = token.top
    if token.flag.kind is not FlagKind.OP or top is None or not top.is_int or top.tag is not ValueTag.FLOW:
        raise StuckError(f"operator flag without a flow value at {describe_port(graph, token.position)}")
    token.flag = RewriteFlag.of(FlagKind.NONE)
    return "flow.op.reset"
