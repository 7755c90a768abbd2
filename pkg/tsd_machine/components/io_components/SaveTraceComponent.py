import logging
import sys

from tsd_machine.components.ComponentsRegister import ComponentsRegister
from tsd_machine.structure.AbstractComponent import AbstractComponent
from tsd_machine.tsd_types import RunData

logger = logging.getLogger(__name__)


class SaveTraceComponent(AbstractComponent):
    """
    Writes the recorded transitions as JSON lines.
    """

    @staticmethod
    def get_help() -> str:
        return """Writes the machine trace as JSONL, one transition per line. Makes run_machine record the trace.
\tAttributes: file (optional, defaults to the configured trace path, or standard output)"""

    def setup(self, data: RunData):
        data.additional_attributes["record_trace"] = True

    def run(self, data: RunData):
        target = self._params.get("file") or (str(data.config.trace_path) if data.config.trace_path else None)
        lines = (event.model_dump_json(exclude_none=True) + "\n" for event in data.trace)
        if target is None:
            sys.stdout.writelines(lines)
            return
        with open(target, "w", encoding="utf-8") as f:
            f.writelines(lines)
        logger.info("%s: wrote %d events to %s", self._name, len(data.trace), target)


ComponentsRegister.register_component("save_trace", SaveTraceComponent)
