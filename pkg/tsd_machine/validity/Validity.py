"""
Executable validity predicates over graphs and machine states.
Graph clauses: wiring, box-form, box-boundary, dataflow, cycle.
State clauses: position, flag, bstack, stack, history, evaluated, props.
"""
import logging
from collections import deque

from tsd_machine.graph import Graph, describe_port
from tsd_machine.tsd_types import (DATAFLOW_TAGS, UNARY_TAGS, Direction, ElemKind, EvalToken, FlagKind, MachineState,
                                   Mode, NodeTag, PortRef, TraceEvent, ValidityReport, ValueTag)

logger = logging.getLogger(__name__)

CYCLE_CHECK_LIMIT = 10_000
_BINDERS = (NodeTag.LAM, NodeTag.REC)
# nodes allowed strictly inside a dataflow environment, leaves (cells, constant boxes) excluded
_ENVIRONMENT_INNER = frozenset({NodeTag.BINOP, NodeTag.IF, NodeTag.CONTRACTION, NodeTag.DEREF})


def region_of(graph: Graph, port: PortRef) -> int | None:
    """Box a port lives in. The content side of a door is inside the box the door delimits."""
    node = graph.node(port.node)
    if node.tag is NodeTag.BANG and not port.is_in:
        return node.boundary
    if node.tag is NodeTag.QUERY and port.is_in:
        return node.boundary
    return node.box


def dataflow_violations(graph: Graph, start: PortRef) -> list[str]:
    """Reasons why the region below `start` is not a dataflow environment, empty if it is one."""
    problems = []
    seen = set()
    pending = deque([start.node])
    while pending:
        ident = pending.popleft()
        if ident in seen:
            continue
        seen.add(ident)
        node = graph.node(ident)
        label = f"{node.kind}#{ident}"
        if node.tag is NodeTag.CELL:
            continue
        if node.tag is NodeTag.BANG:
            content = graph.peer(PortRef.o(ident))
            if content is None or graph.tag(content.node) is not NodeTag.CONST:
                problems.append(f"box {label} does not hold a constant")
            continue
        if node.tag not in _ENVIRONMENT_INNER:
            problems.append(f"{label} is not a dataflow node")
            continue
        children = [graph.peer(port) for port in graph.out_ports(ident)]
        if any(child is None for child in children):
            problems.append(f"{label} has an open out-port")
            continue
        child_tags = [graph.tag(child.node) for child in children]
        match node.tag:
            case NodeTag.CONTRACTION if child_tags[0] in (NodeTag.CONTRACTION, NodeTag.BANG):
                problems.append(f"{label} feeds into {child_tags[0]}, it should have been fused or copied")
            case NodeTag.IF if child_tags[0] is NodeTag.BANG:
                problems.append(f"{label} has a constant condition")
            case NodeTag.BINOP if all(tag is NodeTag.BANG for tag in child_tags):
                problems.append(f"{label} has constant operands only")
        pending.extend(child.node for child in children)
    return problems


def is_dataflow_environment(graph: Graph, start: PortRef) -> bool:
    """
    Whether everything reachable below `start` is built from operators, conditionals, contractions and
    dereferences, with cells and constant boxes at the leaves.
    """
    return not dataflow_violations(graph, start)


def find_cell_free_cycle(graph: Graph) -> list[int]:
    """
    Nodes on a dependency cycle that passes through neither a cell nor a binder, empty if there is none.
    Cycles through cells are feedback loops and cycles through λ or μ are variable bindings.
    """
    blocked = {n.id for n in graph.nodes() if n.tag is NodeTag.CELL or n.tag in _BINDERS}
    remaining = {n.id for n in graph.nodes()} - blocked
    in_degree = {ident: 0 for ident in remaining}
    for ident in remaining:
        for port in graph.out_ports(ident):
            child = graph.peer(port)
            if child is not None and child.node in remaining:
                in_degree[child.node] += 1
    queue = deque(ident for ident, degree in in_degree.items() if degree == 0)
    while queue:
        ident = queue.popleft()
        remaining.discard(ident)
        for port in graph.out_ports(ident):
            child = graph.peer(port)
            if child is not None and child.node in in_degree and child.node in remaining:
                in_degree[child.node] -= 1
                if in_degree[child.node] == 0:
                    queue.append(child.node)
    return sorted(remaining)


def check_valid_graph(graph: Graph, force_cycles: bool = False) -> ValidityReport:
    """
    Check the graph clauses.
    :param force_cycles: run the cycle clause on graphs above the size limit too
    """
    report = ValidityReport()
    for problem in graph.well_formed():
        report.add("graph.wiring", "-", problem)

    for node in graph.nodes():
        if node.tag in _BINDERS:
            bang = graph.peer(PortRef.i(node.id, 1))
            if bang is None or graph.tag(bang.node) is not NodeTag.BANG \
                    or graph.node(bang.node).boundary != node.box:
                report.add("graph.box-form", f"{node.kind}#{node.id}", "binder is not the content of its own box")
        for index, child in enumerate(node.outs):
            if child is None or not graph.has_node(child.node):
                continue
            parent_region = region_of(graph, PortRef.o(node.id, index))
            if parent_region != region_of(graph, child):
                report.add("graph.box-boundary", f"{node.kind}#{node.id}.o{index}",
                           f"edge to {describe_port(graph, child)} crosses a box boundary without a door")

    for cell in graph.cells():
        dependency = graph.peer(PortRef.o(cell))
        if dependency is None:
            report.add("graph.dataflow", f"{{}}#{cell}", "cell has no dependency")
            continue
        for problem in dataflow_violations(graph, dependency):
            report.add("graph.dataflow", f"cell #{cell}", problem)

    if force_cycles or graph.node_count() <= CYCLE_CHECK_LIMIT:
        cycle = find_cell_free_cycle(graph)
        if cycle:
            report.add("graph.cycle", f"nodes {cycle[:8]}", "dependency cycle without a cell or binder")
    else:
        logger.info("skipping the cycle clause on a graph with %d nodes", graph.node_count())
    return report


def _flag_site(graph: Graph, token: EvalToken) -> tuple[NodeTag | None, NodeTag | None]:
    """Tags of the node owning the token's position and of the node above it."""
    position = token.position
    here = graph.tag(position.node) if graph.has_node(position.node) else None
    parent = graph.peer(position) if here is not None else None
    return here, graph.tag(parent.node) if parent is not None else None


_OPERAND_SECOND = (NodeTag.BINOP, NodeTag.LINK, NodeTag.ASSIGN)
_ANSWERS = (ElemKind.INT, ElemKind.LAM, ElemKind.UNIT)
_MARKERS = (ElemKind.IF0, ElemKind.IF1)
_OPERATORS = UNARY_TAGS | frozenset(_OPERAND_SECOND)


def token_path(graph: Graph, token: EvalToken) -> tuple[list[PortRef], str | None]:
    """
    Ports from the token back to where its run started: an unpaired in-port of the graph for the main token,
    the origin cell for a prop token. In-ports and the out-ports above them alternate, the token's end first.
    Contraction in-ports are taken from the box stack.
    :return: the path, and the reason when the box stack or the wiring does not allow one
    """
    path: list[PortRef] = []
    pending = list(token.bstack)
    port = token.position
    while True:
        if port in path:
            return path, f"path runs in a circle through {port}"
        path.append(port)
        above = graph.peer(port)
        if above is None:
            if token.origin is not None:
                return path, f"path reaches the graph interface at {port} instead of cell {token.origin}"
            break
        path.append(above)
        if token.origin is not None and above == PortRef.o(token.origin):
            break
        node = graph.node(above.node)
        match node.tag:
            case NodeTag.CONTRACTION:
                if not pending or pending[-1].node != node.id or pending[-1].index not in node.ins:
                    return path, f"box stack does not lead through {node.kind}#{node.id}"
                port = pending.pop()
            case NodeTag.LAM | NodeTag.REC:
                port = PortRef.i(node.id, 1)
            case _:
                port = PortRef.i(node.id)
    if pending:
        return path, f"{len(pending)} box stack entries are not on the path"
    return path, None


def stack_violations(graph: Graph, token: EvalToken, path: list[PortRef]) -> list[str]:
    """
    Check the computation stack against the path: the top matches the direction, and every operand
    evaluated earlier on the path, and every conditional marker, sits below it in path order.
    """
    stack = list(token.cstack)
    if not stack:
        return []
    problems = []
    top = stack.pop()
    if token.direction is Direction.UP and top.kind is not ElemKind.STAR:
        problems.append(f"token going up with {top} on top")
    if token.direction is Direction.DOWN and top.kind not in _ANSWERS:
        problems.append(f"token going down with {top} on top")

    def expect(kinds: tuple[ElemKind, ...], port: PortRef) -> bool:
        if not stack or stack[-1].kind not in kinds:
            problems.append(f"{port} on the path needs {'/'.join(k.value for k in kinds)} below, "
                            f"found {stack[-1] if stack else 'nothing'}")
            return False
        stack.pop()
        return True

    for out_port in path[1::2]:
        node = graph.node(out_port.node)
        if token.flag.kind is FlagKind.IF and out_port == path[1]:
            continue
        if node.tag in _OPERAND_SECOND and out_port.index == 0:
            ok = expect((ElemKind.INT,), out_port)
        elif node.tag is NodeTag.IF and out_port.index == 1:
            ok = expect(_MARKERS, out_port)
        elif node.tag is NodeTag.IF and out_port.index == 2:
            ok = expect(_ANSWERS, out_port) and expect(_MARKERS, out_port)
        else:
            continue
        if not ok:
            return problems
    if stack:
        problems.append(f"{len(stack)} stack elements are not explained by the path")
    return problems


def is_evaluated(graph: Graph, port: PortRef) -> bool:
    """Whether the graph below an in-port is a value: boxes and cells, possibly under dataflow nodes."""
    above = graph.peer(port)
    if above is not None and graph.tag(above.node) is NodeTag.BANG:
        return True
    seen, pending = set(), [port.node]
    while pending:
        ident = pending.pop()
        if ident in seen:
            continue
        seen.add(ident)
        tag = graph.tag(ident)
        if tag in (NodeTag.BANG, NodeTag.CELL):
            continue
        if tag not in _ENVIRONMENT_INNER:
            return False
        for out_port in graph.out_ports(ident):
            child = graph.peer(out_port)
            if child is None:
                return False
            pending.append(child.node)
    return True


def evaluation_violations(graph: Graph, token: EvalToken, path: list[PortRef]) -> list[str]:
    """Operands the token has already returned from, or is about to use, must be values."""
    problems = []
    here = graph.node(token.position.node)

    def need(port: PortRef, why: str):
        child = graph.peer(port)
        if child is None or not is_evaluated(graph, child):
            problems.append(f"{port} is not evaluated ({why})")

    if token.direction is Direction.DOWN and token.flag.is_none and not is_evaluated(graph, token.position):
        problems.append(f"token returns from {token.position}, which is not a value")
    if token.direction is Direction.DOWN and here.tag in _OPERATORS:
        for out_port in graph.out_ports(here.id):
            need(out_port, f"operand of {here.kind}")
    if token.flag.kind is FlagKind.APP and here.tag is NodeTag.APP:
        for out_port in graph.out_ports(here.id):
            need(out_port, "applied")
    for out_port in path[1::2]:
        node = graph.node(out_port.node)
        if out_port.index == 0 and (node.tag in _OPERAND_SECOND or node.tag is NodeTag.APP):
            need(PortRef.o(node.id, 1), f"right operand of {node.kind}")
        elif node.tag is NodeTag.IF and out_port.index in (1, 2):
            need(PortRef.o(node.id, 0), "condition")
            if out_port.index == 2 and not (token.flag.kind is FlagKind.IF and out_port == path[1]):
                need(PortRef.o(node.id, 1), "else branch")
    return problems


_FLAG_AT_NODE = {
    FlagKind.APP: NodeTag.APP,
    FlagKind.MU: NodeTag.REC,
    FlagKind.MAKE_CELL: NodeTag.MAKE_CELL,
    FlagKind.PEEK: NodeTag.PEEK,
    FlagKind.LINK: NodeTag.LINK,
    FlagKind.ASSIGN: NodeTag.ASSIGN,
    FlagKind.ROOT: NodeTag.ROOT,
    FlagKind.STEP: NodeTag.STEP,
    FlagKind.STEP_PROPAGATE: NodeTag.STEP,
    FlagKind.OP: NodeTag.BINOP,
}
_FLAG_BELOW_NODE = {
    FlagKind.IF: NodeTag.IF,
    FlagKind.CONTRACT: NodeTag.CONTRACTION,
    FlagKind.BANG: NodeTag.BANG,
}


def check_token(graph: Graph, token: EvalToken, name: str, report: ValidityReport, prop: bool = False):
    position = token.position
    if not position.is_in or not graph.has_node(position.node) or position.index not in graph.node(position.node).ins:
        report.add("state.position", name, f"{position} is not a live in-port")
        return
    here, above = _flag_site(graph, token)
    if NodeTag.QUERY in (here, above):
        report.add("state.position", name, f"{position} is a port of a ? door")
    region = region_of(graph, position)
    if region is not None:
        door = graph.peer(position)
        if door is None or graph.tag(door.node) is not NodeTag.BANG or graph.node(door.node).box is not None:
            report.add("state.position", name, f"{position} is inside box {region} away from an outermost ! door")

    kind = token.flag.kind
    if kind in _FLAG_AT_NODE and here is not _FLAG_AT_NODE[kind]:
        report.add("state.flag", name, f"flag {token.flag} at a {here} node")
    if kind in _FLAG_BELOW_NODE and above is not _FLAG_BELOW_NODE[kind]:
        report.add("state.flag", name, f"flag {token.flag} below a {above} node")
    if token.flag.cell is not None and (not graph.has_node(token.flag.cell.node)
                                        or graph.tag(token.flag.cell.node) is not NodeTag.CELL):
        report.add("state.flag", name, f"flag {token.flag} does not point at a live cell")

    bstack_live = True
    for entry in token.bstack:
        if not graph.has_node(entry.node) or graph.tag(entry.node) is not NodeTag.CONTRACTION \
                or entry.index not in graph.node(entry.node).ins:
            report.add("state.bstack", name, f"{entry} is not a contraction in-port")
            bstack_live = False

    if not token.cstack:
        report.add("state.stack", name, "empty computation stack")
    for element in token.cstack:
        if element.is_int and element.tag is ValueTag.CELL and (
                element.cell is None or not graph.has_node(element.cell.node)
                or graph.tag(element.cell.node) is not NodeTag.CELL):
            report.add("state.stack", name, f"{element} does not refer to a live cell")
        if prop and element.kind is ElemKind.LAM:
            report.add("state.stack", name, "function value on a prop token")
    if prop and (token.origin is None or not graph.has_node(token.origin)
                 or graph.tag(token.origin) is not NodeTag.CELL):
        report.add("state.props", name, f"prop token without a live origin cell ({token.origin})")
        return
    if prop and here is not None and here not in DATAFLOW_TAGS:
        report.add("state.props", name, f"prop token at a {here} node")

    if not bstack_live:
        return
    path, broken = token_path(graph, token)
    if broken is not None:
        report.add("state.history", name, broken)
        return
    for problem in stack_violations(graph, token, path):
        report.add("state.history", name, problem)
    for problem in evaluation_violations(graph, token, path):
        report.add("state.evaluated", name, problem)


def check_valid_state(state: MachineState, with_graph: bool = True) -> ValidityReport:
    """Check the main token, the prop tokens and the mode, and the graph unless `with_graph` is false."""
    graph: Graph = state.graph
    report = check_valid_graph(graph) if with_graph else ValidityReport()
    check_token(graph, state.main, "main", report)
    for prop in state.props:
        check_token(graph, prop, f"prop of cell {prop.origin}", report, prop=True)
    propagating = state.main.flag.kind is FlagKind.STEP_PROPAGATE
    if state.props and not propagating:
        report.add("state.props", "main", f"prop tokens alive while the main flag is {state.main.flag}")
    if (state.mode is Mode.PROPAGATE) != propagating:
        report.add("state.mode", "main", f"mode {state.mode} with main flag {state.main.flag}")
    return report


# (computation stack, box stack) depth change of a rule, (0, 0) when missing
_STACK_EFFECT = {
    "pass.binop.o1.down": (1, 0),
    "pass.assign.o1.down": (1, 0),
    "pass.link.o1.down": (1, 0),
    "pass.binop.o0.down": (-1, 0),
    "pass.assign.o0.down": (-1, 0),
    "pass.link.o0.down": (-1, 0),
    "flow.op": (-1, 0),
    "flow.if.cond0": (1, 0),
    "flow.if.cond1": (1, 0),
    "flow.if.o1": (1, 0),
    "flow.if.sel0": (-2, 0),
    "flow.if.sel1": (-2, 0),
    "pass.contraction.ik.up": (0, 1),
    "pass.contraction.ok.down": (0, -1),
    "rw.C-!": (0, -1),
    "rw.delta": (0, -1),
}
_FRESH_PROP = (1, 0)


def check_trace(events: list[TraceEvent]) -> ValidityReport:
    """
    Path-level checks over a recorded run: numbering, commits only after a switch to propagation, and each
    token's stack history. Every token's events are replayed in order; the stack depths recorded before a rule
    must be the depths left by the token's previous rule. Prop tokens start and end with one value and no box entries.
    """
    report = ValidityReport()
    switched = False
    depths: dict[str, tuple[int, int]] = {}
    for expected, event in enumerate(events):
        location = f"event {expected}"
        if event.seq != expected:
            report.add("trace.seq", location, f"numbered {event.seq}")
        if event.cstack_depth < 1:
            report.add("trace.stack", location, f"{event.rule_id} taken with an empty stack")

        actual = (event.cstack_depth, event.bstack_depth)
        previous = depths.get(event.token)
        if previous is None and event.token != "main" and actual != _FRESH_PROP:
            report.add("trace.history", location, f"{event.token} starts with stack depths {actual}")
        elif previous is not None and previous != actual:
            report.add("trace.history", location,
                       f"{event.token} takes {event.rule_id} with stack depths {actual}, its history leaves {previous}")
        change = _STACK_EFFECT.get(event.rule_id, (0, 0))
        depths[event.token] = (actual[0] + change[0], actual[1] + change[1])

        if event.rule_id == "mode.sp":
            switched = True
        elif event.rule_id == "mode.commit":
            if not switched:
                report.add("trace.commit", location, "commit without a preceding switch")
            switched = False
            for token in [t for t in depths if t != "main"]:
                left = depths.pop(token)
                if left != _FRESH_PROP:
                    report.add("trace.history", location, f"{token} finished with stack depths {left}")
        elif event.mode is Mode.PROPAGATE and not switched:
            report.add("trace.mode", location, "propagation transition outside a step")
    return report
