import logging
from datetime import datetime

from tsd_machine.common.errors import ComponentParserError
from tsd_machine.components.ComponentsRegister import ComponentsRegister
from tsd_machine.structure.AbstractComponent import AbstractComponent
from tsd_machine.tsd_types import RunData

logger = logging.getLogger(__name__)


class SaveRunDataToJsonComponent(AbstractComponent):
    """
    Saves the whole run data (program, type, outcome, reports, trace) to a JSON file.
    """

    def __init__(self, params: dict[str, str], *args, **kwargs) -> None:
        super().__init__(params, *args, **kwargs)
        if "file" not in params:
            raise ComponentParserError("file parameter is required for SaveRunDataToJsonComponent.")

    @staticmethod
    def get_help() -> str:
        return """Saves the whole run data to a JSON file.\n\tAttributes: file (will be formatted using datetime.strftime), trace (optional, "false" drops the trace)"""

    def setup(self, data: RunData):
        pass

    def run(self, data: RunData):
        filepath = datetime.now().strftime(self._params["file"])
        logger.info("%s: saving run data to %s", self._name, filepath)
        data.additional_attributes["last_save_path"] = filepath
        exclude = None if self._flag("trace", default=True) else {"trace"}
        with open(filepath, "w+", encoding="utf-8") as f:
            f.write(data.model_dump_json(indent=4, exclude=exclude))


ComponentsRegister.register_component("save_run_data_json", SaveRunDataToJsonComponent)
