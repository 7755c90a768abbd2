import logging

from tsd_machine.common.errors import GraphError, PropagationError, StuckError, ValidityError
from tsd_machine.graph import Graph
from tsd_machine.propagation import Propagator
from tsd_machine.translation import TranslationResult, translate_program
from tsd_machine.tsd_types import (CellUpdate, Direction, ElemKind, EvalToken, FlagKind, Final, FuelExhausted,
                                   MachineState, Mode, NodeTag, PropReport, RewriteFlag, RunConfig, StackElem, Stuck,
                                   TraceEvent, ValidateLevel)
from tsd_machine.validity.Validity import check_valid_state
from .PassRules import pass_step
from .RewriteRules import rewrite_step

logger = logging.getLogger(__name__)


def init_state(translation: TranslationResult) -> MachineState:
    """
    Initial state: the token sits ↑ on the root edge with [⋆], no flag, no prop tokens.
    :raises GraphError: if the translated term has free variables
    """
    if not translation.is_closed:
        names = ", ".join(sorted(translation.free_var_ports))
        raise GraphError(f"open-term: free variables {names}")
    return MachineState(graph=translation.graph, main=EvalToken(position=translation.root))


def restart_state(graph: Graph) -> MachineState:
    """
    Initial state on a graph taken from a run: a fresh token sits ↑ on the graph's only unpaired in-port.
    :raises GraphError: if the graph does not have exactly one unpaired in-port
    """
    roots, _ = graph.interface()
    if len(roots) != 1:
        raise GraphError(f"open-term: expected one root in-port, found {len(roots)}")
    return MachineState(graph=graph, main=EvalToken(position=roots[0]))


def is_final(state: MachineState) -> bool:
    """The main token came back down through the root with exactly one value and nothing pending."""
    token = state.main
    return (state.mode is Mode.CONSTRUCT and not state.props and token.direction is Direction.DOWN
            and token.flag.is_none and len(token.cstack) == 1 and not token.bstack
            and state.graph.peer(token.position) is None)


class Machine:
    """
    Drives the main token through pass and rewrite transitions, and runs a whole propagation
    whenever the token reaches a `step`.
    """

    def __init__(self, config: RunConfig | None = None, trace: list[TraceEvent] | None = None):
        """
        :param config: fuel, schedule, validation level and step result convention
        :param trace: if given, every transition is appended to it
        """
        self.config = config or RunConfig()
        self.trace = trace

    def switch_to_propagation(self, state: MachineState) -> str:
        state.mode = Mode.PROPAGATE
        state.main.flag = RewriteFlag.of(FlagKind.STEP_PROPAGATE)
        state.props = Propagator.init_prop_tokens(state.graph)
        logger.debug("step: %d prop tokens", len(state.props))
        return "mode.sp"

    def commit_propagation(self, state: MachineState, report: PropReport) -> list[CellUpdate]:
        """Write the changed cells and hand the step result to the main token."""
        changes = [CellUpdate(cell=c.cell, old=c.old, new=c.returned) for c in report.cells if c.changed]
        updated = Propagator.commit(state.graph, report)
        result = int(updated > 0) if self.config.step_returns_bool else updated
        state.props = []
        state.mode = Mode.CONSTRUCT
        state.prop_transitions += report.total_transitions
        state.step_counts.append(result)
        state.cell_history.append(state.cell_values())
        token = state.main
        token.cstack[-1] = StackElem.of_int(result)
        token.direction = Direction.DOWN
        token.flag = RewriteFlag.of(FlagKind.STEP)
        logger.debug("step committed: %d of %d cells updated", updated, len(report.cells))
        return changes

    def step(self, state: MachineState) -> str:
        """
        Take one main-token transition; a whole propagation counts as one.
        :return: the rule id
        :raises StuckError: when no rule matches
        :raises PropagationError: when a prop token misbehaves
        """
        graph: Graph = state.graph
        token = state.main
        before = self._describe(graph, token)
        prop_events: list[TraceEvent] | None = [] if self.trace is not None else None
        changes = None
        if state.mode is Mode.PROPAGATE:
            report = Propagator.propagate(graph, self.config.schedule, tokens=state.props,
                                          fuel_factor=self.config.prop_fuel_factor, trace=prop_events)
            changes = self.commit_propagation(state, report)
            rule = "mode.commit"
        elif token.flag.is_none and token.direction is Direction.UP and graph.tag(token.position.node) is NodeTag.STEP:
            if token.top is None or token.top.kind is not ElemKind.STAR:
                raise StuckError(f"step reached without ⋆ on the stack: {token}")
            rule = self.switch_to_propagation(state)
        elif token.flag.is_none:
            rule = pass_step(graph, token)
        else:
            rule = rewrite_step(state)
        if self.trace is not None:
            for event in prop_events or []:
                self._record(event)
            self._record(TraceEvent(seq=0, mode=Mode.PROPAGATE if changes is not None else Mode.CONSTRUCT,
                                    rule_id=rule, graph_nodes=graph.node_count(), commit=changes, **before))
        return rule

    def run(self, state: MachineState, fuel: int | None = None):
        """
        Run until the final state, a stuck configuration or the fuel limit.
        :param fuel: maximum main-token transitions, by default the configured fuel
        :return: Final, Stuck or FuelExhausted
        """
        fuel = self.config.fuel if fuel is None else fuel
        level = self.config.validate_level
        if level is not ValidateLevel.OFF:
            self._validate(state)
        while not is_final(state):
            if state.steps >= fuel:
                logger.info("fuel exhausted after %d transitions", state.steps)
                return FuelExhausted(**self._counters(state))
            try:
                rule = self.step(state)
            except (StuckError, PropagationError) as e:
                logger.info("stuck after %d transitions: %s", state.steps, e)
                return Stuck(diagnosis=str(e), **self._counters(state))
            state.steps += 1
            if level is ValidateLevel.EVERY_STEP or (level is ValidateLevel.COMMIT and rule == "mode.commit"):
                self._validate(state)
        logger.info("final value %s after %d transitions (%d in propagation)", state.main.top, state.steps,
                    state.prop_transitions)
        return Final(value=state.main.top, **self._counters(state))

    @staticmethod
    def _validate(state: MachineState):
        report = check_valid_state(state)
        if not report.passed:
            logger.error("invalid state after %d transitions", state.steps)
            raise ValidityError(report)

    @staticmethod
    def _counters(state: MachineState) -> dict:
        return dict(steps=state.steps, prop_transitions=state.prop_transitions,
                    observations=list(state.observations), step_counts=list(state.step_counts),
                    cell_history=[dict(h) for h in state.cell_history], state=state)

    @staticmethod
    def _describe(graph: Graph, token: EvalToken) -> dict:
        dispatch = token.position
        if token.direction is Direction.DOWN and token.flag.is_none:
            dispatch = graph.peer(token.position) or token.position
        node = graph.node(dispatch.node) if graph.has_node(dispatch.node) else None
        return dict(node_kind=str(node.kind) if node is not None else "?", port=str(token.position),
                    direction=str(token.direction), flag=str(token.flag), cstack_depth=len(token.cstack),
                    bstack_depth=len(token.bstack))

    def _record(self, event: TraceEvent):
        self.trace.append(event.model_copy(update={"seq": len(self.trace)}))


def run(state: MachineState, fuel: int | None = None, config: RunConfig | None = None,
        trace: list[TraceEvent] | None = None):
    return Machine(config, trace).run(state, fuel)


def run_program(source: str, config: RunConfig | None = None, trace: list[TraceEvent] | None = None):
    """Parse, typecheck, translate and run a program text."""
    return run(init_state(translate_program(source)), config=config, trace=trace)
