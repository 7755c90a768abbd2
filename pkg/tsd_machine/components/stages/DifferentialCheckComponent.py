import logging

from tsd_machine.common.errors import ComponentError
from tsd_machine.components.ComponentsRegister import ComponentsRegister
from tsd_machine.oracle import differential_check
from tsd_machine.structure.AbstractComponent import AbstractComponent
from tsd_machine.tsd_types import RunData

logger = logging.getLogger(__name__)


class DifferentialCheckComponent(AbstractComponent):
    """
    Runs the program on the machine and on the reference evaluator and compares them.
    Stores the report in additional_attributes["agreement"].
    """

    @staticmethod
    def get_help() -> str:
        return """Compares final value, peeks, step results and cell values between the machine and the reference evaluator."""

    def setup(self, data: RunData):
        pass

    def run(self, data: RunData):
        if data.term is None:
            raise ComponentError(self, "no term to check, parse must run first")
        report = differential_check(data.term, data.config)
        data.additional_attributes["agreement"] = report.model_dump()
        print(f"machine: {report.machine}")
        print(f"oracle:  {report.oracle}")
        for mismatch in report.mismatches:
            print(f"mismatch: {mismatch}")
        print("agree" if report.agree else "DISAGREE")


ComponentsRegister.register_component("differential_check", DifferentialCheckComponent)
