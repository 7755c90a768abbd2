import logging

from tsd_machine.common.errors import ComponentError
from tsd_machine.components.ComponentsRegister import ComponentsRegister
from tsd_machine.structure.AbstractComponent import AbstractComponent
from tsd_machine.syntax import typecheck
from tsd_machine.tsd_types import RunData

logger = logging.getLogger(__name__)


class TypecheckComponent(AbstractComponent):
    """
    Infers the type of the parsed term.
    """

    @staticmethod
    def get_help() -> str:
        return """Infers the simple type of the program and rejects ill-typed programs."""

    def setup(self, data: RunData):
        pass

    def run(self, data: RunData):
        if data.term is None:
            raise ComponentError(self, "no term to typecheck, parse must run first")
        data.type = typecheck(data.term)
        logger.info("%s: program has type %s", self._name, data.type)


ComponentsRegister.register_component("typecheck", TypecheckComponent)
