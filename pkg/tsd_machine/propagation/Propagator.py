"""
Step propagation: one prop token per cell evaluates the cell's dependency against the pre-step values.
The graph is only read while tokens run; `commit` is the single writer.
"""
import logging
import random
from collections import deque

from tqdm.contrib.concurrent import thread_map

from tsd_machine.common.errors import PropagationError, StuckError
from tsd_machine.graph import Graph, describe_port
from tsd_machine.machine.DataflowRules import reset_operator_flag
from tsd_machine.machine.PassRules import pass_step, stuck
from tsd_machine.tsd_types import (DATAFLOW_TAGS, PROP_FUEL_FACTOR, CellResult, Direction, EvalToken, FlagKind, Mode,
                                   PortRef, PropReport, RewriteFlag, Schedule, TraceEvent, ValueTag)

logger = logging.getLogger(__name__)

_PATH_TAIL = 64


def init_prop_tokens(graph: Graph) -> list[EvalToken]:
    """One token per cell, sitting ↑ on the cell's dependency edge, in cell creation order."""
    tokens = []
    for cell in graph.cells():
        dependency = graph.peer(PortRef.o(cell))
        if dependency is None:
            raise PropagationError(f"cell {cell} has no dependency", [])
        tokens.append(EvalToken(position=dependency, direction=Direction.UP, origin=cell))
    return tokens


def prop_token_name(token: EvalToken) -> str:
    return f"cell {token.origin}"


def is_final_prop(graph: Graph, token: EvalToken) -> bool:
    """The token came back down to its own cell with a single value."""
    return (token.direction is Direction.DOWN and token.flag.is_none and len(token.cstack) == 1
            and not token.bstack and graph.peer(token.position) == PortRef.o(token.origin))


def prop_step(graph: Graph, token: EvalToken) -> str:
    """
    One transition of a prop token. Pass and dataflow rows only; flags that would rewrite in construct mode
    are reset, since the dataflow part of the graph never needs copying.
    :raises StuckError: when the token leaves the dataflow part of the graph or no row matches
    """
    match token.flag.kind:
        case FlagKind.NONE:
            dispatch = token.position if token.direction is Direction.UP else graph.peer(token.position)
            if dispatch is None or graph.tag(dispatch.node) not in DATAFLOW_TAGS:
                raise stuck(graph, token, "prop token left the dataflow environment")
            return pass_step(graph, token)
        case FlagKind.CONTRACT:
            token.flag = RewriteFlag.of(FlagKind.NONE)
            return "rw.C"
        case FlagKind.BANG:
            token.flag = RewriteFlag.of(FlagKind.NONE)
            return "rw.X-!"
        case FlagKind.OP:
            top = token.top
            if top is not None and top.is_int and top.tag is ValueTag.PLAIN:
                logger.warning("operator over constants only at %s, it should have been folded during construction",
                               describe_port(graph, token.position))
            return reset_operator_flag(token, graph)
    raise stuck(graph, token, "rewrite flag during propagation")


class _PropRun:
    """A prop token with its own transition count, path tail and optional trace."""

    def __init__(self, token: EvalToken, fuel: int, record: bool):
        self.token = token
        self.fuel = fuel
        self.transitions = 0
        self.path = deque(maxlen=_PATH_TAIL)
        self.events: list[TraceEvent] | None = [] if record else None

    def advance(self, graph: Graph) -> bool:
        """
        Take one transition.
        :return: False when the token is already final
        """
        token = self.token
        if is_final_prop(graph, token):
            return False
        if self.transitions >= self.fuel:
            raise PropagationError(f"prop token of cell {token.origin} exceeded {self.fuel} transitions",
                                   list(self.path))
        before = (str(token.position), str(token.direction), str(token.flag), len(token.cstack), len(token.bstack))
        dispatch = token.position if token.direction is Direction.UP or not token.flag.is_none \
            else graph.peer(token.position)
        try:
            rule = prop_step(graph, token)
        except StuckError as e:
            self.path.append(f"stuck@{before[0]}")
            raise PropagationError(str(e), list(self.path)) from e
        self.transitions += 1
        self.path.append(f"{rule}@{before[0]}")
        if self.events is not None:
            self.events.append(TraceEvent(seq=0, token=prop_token_name(token), mode=Mode.PROPAGATE,
                                          rule_id=rule, node_kind=str(graph.node(dispatch.node).kind), port=before[0],
                                          direction=before[1], flag=before[2], cstack_depth=before[3],
                                          bstack_depth=before[4], graph_nodes=graph.node_count()))
        return True

    def run(self, graph: Graph) -> "_PropRun":
        while self.advance(graph):
            pass
        return self


def propagate(graph: Graph, schedule: Schedule | None = None, tokens: list[EvalToken] | None = None,
              fuel_factor: int = PROP_FUEL_FACTOR, trace: list[TraceEvent] | None = None) -> PropReport:
    """
    Drive every prop token to its final state. The graph is not modified.
    :param tokens: tokens to advance in place, by default fresh ones from `init_prop_tokens`
    :param fuel_factor: per-token fuel is this times the node count
    :param trace: if given, the transitions are appended to it token by token in cell order
    :return: old and returned value of every cell
    :raises PropagationError: if a token runs out of fuel or gets stuck
    """
    schedule = schedule or Schedule()
    tokens = init_prop_tokens(graph) if tokens is None else tokens
    fuel = fuel_factor * max(graph.node_count(), 1)
    runs = [_PropRun(token, fuel, trace is not None) for token in tokens]
    match schedule.kind:
        case "rr":
            active = list(runs)
            while active:
                active = [run for run in active if run.advance(graph)]
        case "rand":
            rng = random.Random(schedule.seed)
            active = list(runs)
            while active:
                run = rng.choice(active)
                if not run.advance(graph):
                    active.remove(run)
        case "par":
            thread_map(lambda r: r.run(graph), runs, max_workers=schedule.workers, disable=True)

    report = PropReport()
    for run in sorted(runs, key=lambda r: r.token.origin):
        token = run.token
        if not token.top.is_int:
            raise PropagationError(f"cell {token.origin} received a non-integer {token.top}", list(run.path))
        report.cells.append(CellResult(cell=token.origin, old=graph.node(token.origin).value,
                                       returned=token.top.value))
        report.transitions_per_token[token.origin] = run.transitions
        if trace is not None:
            trace.extend(run.events)
    logger.debug("propagation [%s]: %d cells, %d transitions, %d changed", schedule, len(report.cells),
                 report.total_transitions, report.updated_count)
    return report


def commit(graph: Graph, report: PropReport) -> int:
    """
    Write every changed cell. All values were computed before any write.
    :return: number of updated cells
    """
    for result in report.cells:
        if result.changed:
            graph.set_value(result.cell, result.returned)
    return report.updated_count
