import logging

from tsd_machine.common.errors import ComponentError, ComponentParserError
from tsd_machine.components.ComponentsRegister import ComponentsRegister
from tsd_machine.machine import Machine, init_state
from tsd_machine.structure.AbstractComponent import AbstractComponent
from tsd_machine.tsd_types import RunData, Schedule, ValidateLevel

logger = logging.getLogger(__name__)


class RunMachineComponent(AbstractComponent):
    """
    Runs the machine on a copy of the translated graph, so the translation stays the initial graph.
    """

    def __init__(self, params: dict[str, str], *args, **kwargs) -> None:
        super().__init__(params, *args, **kwargs)
        overrides = {}
        if "fuel" in params:
            overrides["fuel"] = self._int_param("fuel")
        try:
            if "schedule" in params:
                overrides["schedule"] = Schedule.parse(params["schedule"])
            if "validate" in params:
                overrides["validate_level"] = ValidateLevel(params["validate"])
        except ValueError as e:
            raise ComponentParserError(f"run_machine: {e}") from None
        if "step_returns_bool" in params:
            overrides["step_returns_bool"] = self._flag("step_returns_bool")
        self._overrides = overrides

    @staticmethod
    def get_help() -> str:
        return """Runs the machine to a final value, a stuck state or fuel exhaustion.
\tAttributes (all optional, override the run configuration): fuel, schedule (rr, rand:<seed>, par:<k>), validate (off, commit, every-step), step_returns_bool, trace ("true" records every transition)"""

    def setup(self, data: RunData):
        if self._overrides:
            data.config = data.config.model_copy(update=self._overrides)

    def run(self, data: RunData):
        if data.translation is None:
            raise ComponentError(self, "no graph to run, translate must run first")
        translation = data.translation.model_copy(update={"graph": data.translation.graph.snapshot()})
        record = self._flag("trace") or data.additional_attributes.get("record_trace", False) \
            or data.config.trace_path is not None
        data.trace = []
        machine = Machine(data.config, data.trace if record else None)
        logger.info("%s: running with fuel %d, schedule %s, validation %s", self._name, data.config.fuel,
                    data.config.schedule, data.config.validate_level)
        data.outcome = machine.run(init_state(translation))
        logger.info("%s: %s after %d transitions", self._name, data.outcome.kind, data.outcome.steps)


ComponentsRegister.register_component("run_machine", RunMachineComponent)
