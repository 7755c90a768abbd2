import logging

from pydantic import BaseModel, Field, computed_field

from tsd_machine.common.errors import EvaluationError
from tsd_machine.machine import Machine, init_state
from tsd_machine.syntax import pretty, typecheck
from tsd_machine.translation import translate
from tsd_machine.tsd_types import ElemKind, Final, FuelExhausted, RunConfig, StackElem, Term, ValueTag
from .Oracle import DEFAULT_ORACLE_FUEL, oracle_eval

logger = logging.getLogger(__name__)


class AgreementReport(BaseModel):
    program: str = Field(..., description="Pretty-printed program.")
    machine: str = Field(..., description="Machine outcome summary.")
    oracle: str = Field(..., description="Oracle outcome summary.")
    mismatches: list[str] = Field(default_factory=list)

    @computed_field
    @property
    def agree(self) -> bool:
        return not self.mismatches


def machine_observable(value: StackElem) -> tuple:
    match value.kind:
        case ElemKind.INT if value.tag is ValueTag.CELL:
            return ("cell",)
        case ElemKind.INT:
            return "int", value.value
        case ElemKind.UNIT:
            return ("unit",)
    return ("fun",)


def differential_check(term: Term, config: RunConfig | None = None,
                       oracle_fuel: int = DEFAULT_ORACLE_FUEL) -> AgreementReport:
    """
    Run a well-typed term on the machine and on the oracle and compare the final value,
    the peeked values, the step results and the cell values after every step.
    Failures agree only when both sides fail the same way: division by zero, or running out of fuel.
    """
    config = config or RunConfig()
    typecheck(term)
    outcome = Machine(config).run(init_state(translate(term)))
    try:
        reference = oracle_eval(term, oracle_fuel, config.step_returns_bool)
    except EvaluationError as e:
        reference = None
        oracle_failure = e.kind
        oracle_summary = f"error: {e}"
    else:
        oracle_failure = None
        oracle_summary = f"value {reference.observable}, peeks {reference.observations}"

    report = AgreementReport(program=pretty(term), machine=_summary(outcome), oracle=oracle_summary)
    if reference is None or not isinstance(outcome, Final):
        machine_failure = failure_kind(outcome)
        if machine_failure != oracle_failure:
            report.mismatches.append(f"machine {machine_failure or 'finished'}, oracle {oracle_failure or 'finished'}")
            logger.warning("machine and oracle fail differently on %s: %s", report.program, report.mismatches[0])
        return report

    if machine_observable(outcome.value) != reference.observable:
        report.mismatches.append(f"final value {machine_observable(outcome.value)} != {reference.observable}")
    if outcome.observations != reference.observations:
        report.mismatches.append(f"peeks {outcome.observations} != {reference.observations}")
    if outcome.step_counts != reference.step_counts:
        report.mismatches.append(f"step results {outcome.step_counts} != {reference.step_counts}")
    machine_history = [[values[cell] for cell in sorted(values)] for values in outcome.cell_history]
    if machine_history != reference.cell_history:
        report.mismatches.append(f"cell history {machine_history} != {reference.cell_history}")
    if not report.agree:
        logger.warning("machine and oracle disagree on %s: %s", report.program, "; ".join(report.mismatches))
    return report


def _summary(outcome) -> str:
    if isinstance(outcome, Final):
        return f"value {machine_observable(outcome.value)}, peeks {outcome.observations}"
    if isinstance(outcome, FuelExhausted):
        return f"fuel exhausted after {outcome.steps} transitions"
    return f"stuck: {outcome.diagnosis}"


def failure_kind(outcome) -> str | None:
    """How a machine run failed, in the oracle's terms: "division", "fuel", "stuck", or None for a final value."""
    if isinstance(outcome, Final):
        return None
    if isinstance(outcome, FuelExhausted):
        return "fuel"
    return "division" if "division by zero" in outcome.diagnosis else "stuck"
