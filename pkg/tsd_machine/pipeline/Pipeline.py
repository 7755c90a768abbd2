import logging
import time

from tsd_machine.components import ComponentParser
from tsd_machine.structure import AbstractComponent
from tsd_machine.tsd_types import RunData

logger = logging.getLogger(__name__)


class Pipeline:
    def __init__(self, components: list[AbstractComponent]):
        self.components = components
        self._data = None

    def setup_and_run(self, input_data: RunData | None = None) -> RunData:
        if input_data:
            self._data = input_data
        elif self._data is None:
            self._data = RunData()

        for component in self.components:
            logger.debug("Setting up component %s of type %s", component.get_name(), component.__class__.__name__)
            component.setup(self._data)

        for component in self.components:
            if not component.should_run:
                logger.info("Skipping component %s", component.get_name())
                continue
            started = time.perf_counter()
            component.run(self._data)
            logger.info("Component %s finished in %.3f s", component.get_name(), time.perf_counter() - started)

        logger.debug("Pipeline finished")
        return self._data

    @staticmethod
    def from_component_strings(component_strings: list[str]) -> 'Pipeline':
        """
        Create a pipeline from stage strings, e.g. ["load_program[file=a.tsd]", "parse", "typecheck"].
        """
        components = [ComponentParser.parse_component_string(s) for s in component_strings]
        for i, component in enumerate(components):
            component.set_name(f"{component.__class__.__name__}_{i}")
        return Pipeline(components)
