import logging

from tsd_machine.components.ComponentsRegister import ComponentsRegister
from tsd_machine.structure.AbstractComponent import AbstractComponent
from tsd_machine.syntax import parse
from tsd_machine.tsd_types import RunData, term_size

logger = logging.getLogger(__name__)


class ParseComponent(AbstractComponent):
    """
    Parses the loaded program text into a term.
    """

    @staticmethod
    def get_help() -> str:
        return """Parses the program text into a term."""

    def setup(self, data: RunData):
        pass

    def run(self, data: RunData):
        data.term = parse(data.source)
        logger.info("%s: parsed %s, %d term nodes", self._name, data.source_name, term_size(data.term))


ComponentsRegister.register_component("parse", ParseComponent)
