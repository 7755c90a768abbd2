import logging
from pathlib import Path

from tsd_machine.common.errors import ComponentParserError
from tsd_machine.components.ComponentsRegister import ComponentsRegister
from tsd_machine.structure.AbstractComponent import AbstractComponent
from tsd_machine.tsd_types import RunData

logger = logging.getLogger(__name__)


class LoadProgramFromFileComponent(AbstractComponent):
    """
    Loads program text from a file into the run data.
    The file parameter wins over the run data's source path.
    """

    @staticmethod
    def get_help() -> str:
        return """Loads a .tsd program from a file.
\tAttributes: file (optional when the run data names the program file)"""

    def setup(self, data: RunData):
        if "file" not in self._params and data.source_path is None:
            raise ComponentParserError("file parameter is required for LoadProgramFromFileComponent "
                                       "when the run data names no program file.")

    def run(self, data: RunData):
        path = Path(self._params["file"]) if "file" in self._params else data.source_path
        data.source = path.read_text(encoding="utf-8")
        data.source_name = str(path)
        logger.info("%s: loaded %d characters from %s", self._name, len(data.source), path)


ComponentsRegister.register_component("load_program", LoadProgramFromFileComponent)
