from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from .MachineState import Outcome
from .Reports import ValidityReport
from .RunConfig import RunConfig
from .Term import Term
from .TraceEvent import TraceEvent
from .Type import Type


class RunData(BaseModel):
    """State passed between pipeline stages."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    source: str = Field(default_factory=lambda: "")
    source_name: str = Field(default_factory=lambda: "<memory>")
    source_path: Path | None = Field(default=None, description="Program file for load_program without a file.")
    config: RunConfig = Field(default_factory=RunConfig)
    term: Term | None = None
    type: Type | None = None
    translation: Any = Field(default=None, exclude=True, description="TranslationResult of the program.")
    outcome: Outcome | None = None
    trace: list[TraceEvent] = Field(default_factory=lambda: [])
    validity: ValidityReport | None = None
    dot: str | None = None
    additional_attributes: dict[str, Any] = Field(default_factory=lambda: {})  # free-form data of custom stages
