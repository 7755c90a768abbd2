from __future__ import annotations

from enum import Enum
from typing import TYPE_CHECKING, Any, Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field

from .Token import EvalToken, StackElem

if TYPE_CHECKING:
    from tsd_machine.graph import Graph


class Mode(str, Enum):
    CONSTRUCT = "construct"
    PROPAGATE = "propagate"

    def __str__(self):
        return self.value


class MachineState(BaseModel):
    """Graph, main token, prop tokens and mode, plus the counters the driver keeps while running."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    graph: Any = Field(..., description="The Graph being rewritten.")
    main: EvalToken = Field(..., description="Main evaluation token.")
    props: list[EvalToken] = Field(default_factory=list, description="Prop tokens, nonempty only while propagating.")
    mode: Mode = Field(default=Mode.CONSTRUCT)
    steps: int = Field(default=0, description="Main-token transitions taken.")
    prop_transitions: int = Field(default=0, description="Prop-token transitions over all propagations.")
    observations: list[int] = Field(default_factory=list, description="Values read by peek, in order.")
    step_counts: list[int] = Field(default_factory=list, description="Return value of every step command.")
    cell_history: list[dict[int, int]] = Field(default_factory=list, description="Cell valuation after every step.")

    def snapshot(self) -> MachineState:
        return MachineState(graph=self.graph.snapshot(), main=self.main.clone(),
                            props=[p.clone() for p in self.props], mode=self.mode, steps=self.steps,
                            prop_transitions=self.prop_transitions, observations=list(self.observations),
                            step_counts=list(self.step_counts), cell_history=[dict(h) for h in self.cell_history])

    def cell_values(self) -> dict[int, int]:
        graph: Graph = self.graph
        return {cell: graph.node(cell).value for cell in graph.cells()}


class _OutcomeBase(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    steps: int = Field(default=0, description="Main-token transitions consumed.")
    prop_transitions: int = Field(default=0, description="Prop-token transitions consumed.")
    observations: list[int] = Field(default_factory=list, description="Values read by peek, in order.")
    step_counts: list[int] = Field(default_factory=list, description="Return value of every step command.")
    cell_history: list[dict[int, int]] = Field(default_factory=list, description="Cell valuation after every step.")
    state: MachineState | None = Field(default=None, exclude=True, description="Last machine state.")


class Final(_OutcomeBase):
    kind: Literal["final"] = "final"
    value: StackElem


class Stuck(_OutcomeBase):
    kind: Literal["stuck"] = "stuck"
    diagnosis: str


class FuelExhausted(_OutcomeBase):
    kind: Literal["fuel_exhausted"] = "fuel_exhausted"


Outcome = Annotated[Union[Final, Stuck, FuelExhausted], Field(discriminator="kind")]
