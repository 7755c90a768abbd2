import logging

from tsd_machine.common.errors import ComponentError
from tsd_machine.components.ComponentsRegister import ComponentsRegister
from tsd_machine.structure.AbstractComponent import AbstractComponent
from tsd_machine.tsd_types import ElemKind, Final, FuelExhausted, RunData, StackElem, ValueTag

logger = logging.getLogger(__name__)


def format_value(value: StackElem) -> str:
    match value.kind:
        case ElemKind.INT if value.tag is ValueTag.CELL:
            return f"<cell {{{value.value}}}>"
        case ElemKind.INT:
            return str(value.value)
        case ElemKind.UNIT:
            return "()"
        case ElemKind.LAM:
            return "<fun>"
    return str(value)


class PrintOutcomeComponent(AbstractComponent):
    """
    Prints the peeked values of a run, or its final value when nothing was peeked.
    """

    @staticmethod
    def get_help() -> str:
        return """Prints every peeked value on its own line, or the final value if the program never peeks.
\tAttributes: value (optional, "true" always prints the final value too), stats (optional, "true" prints transition counts)"""

    def setup(self, data: RunData):
        pass

    def run(self, data: RunData):
        outcome = data.outcome
        if outcome is None:
            raise ComponentError(self, "no outcome to print, run_machine must run first")
        for observation in outcome.observations:
            print(observation)
        if isinstance(outcome, Final):
            if not outcome.observations or self._flag("value"):
                print(format_value(outcome.value))
        elif isinstance(outcome, FuelExhausted):
            logger.warning("fuel exhausted after %d transitions", outcome.steps)
        else:
            logger.error("stuck after %d transitions: %s", outcome.steps, outcome.diagnosis)
        if self._flag("stats"):
            print(f"transitions: {outcome.steps} (propagation: {outcome.prop_transitions}), "
                  f"steps: {outcome.step_counts}")


ComponentsRegister.register_component("print_outcome", PrintOutcomeComponent)
