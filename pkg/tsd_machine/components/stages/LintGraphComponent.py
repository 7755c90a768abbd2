import logging

from tsd_machine.common.errors import ComponentError
from tsd_machine.components.ComponentsRegister import ComponentsRegister
from tsd_machine.structure.AbstractComponent import AbstractComponent
from tsd_machine.tsd_types import RunData
from tsd_machine.validity import check_valid_graph

logger = logging.getLogger(__name__)


class LintGraphComponent(AbstractComponent):
    """
    Checks the translated graph against the validity clauses and prints every violation.
    """

    @staticmethod
    def get_help() -> str:
        return """Checks the translated graph (wiring, boxes, dataflow environments, cycles) and prints the violations.
\tAttributes: force_cycles (optional, "true" checks cycles on graphs of any size)"""

    def setup(self, data: RunData):
        pass

    def run(self, data: RunData):
        if data.translation is None:
            raise ComponentError(self, "no graph to lint, translate must run first")
        data.validity = check_valid_graph(data.translation.graph, force_cycles=self._flag("force_cycles"))
        for violation in data.validity.violations:
            print(violation)
        if data.validity.passed:
            print(f"{data.source_name}: valid")
        else:
            logger.warning("%s: %d violations", self._name, len(data.validity.violations))


ComponentsRegister.register_component("lint_graph", LintGraphComponent)
