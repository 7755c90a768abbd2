import logging

from tsd_machine.common.errors import ComponentError
from tsd_machine.components.ComponentsRegister import ComponentsRegister
from tsd_machine.structure.AbstractComponent import AbstractComponent
from tsd_machine.translation import translate
from tsd_machine.tsd_types import RunData

logger = logging.getLogger(__name__)


class TranslateComponent(AbstractComponent):
    """
    Translates the term into its graph.
    """

    @staticmethod
    def get_help() -> str:
        return """Translates the term into a graph with !-boxes, contractions and primitive nodes."""

    def setup(self, data: RunData):
        pass

    def run(self, data: RunData):
        if data.term is None:
            raise ComponentError(self, "no term to translate, parse must run first")
        data.translation = translate(data.term)
        data.translation.type = data.type
        logger.info("%s: %d nodes, %d boxes", self._name, data.translation.graph.node_count(),
                    len(data.translation.graph.boxes()))


ComponentsRegister.register_component("translate", TranslateComponent)
