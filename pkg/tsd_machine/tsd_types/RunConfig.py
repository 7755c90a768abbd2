import os
from enum import Enum
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field

from .Reports import Schedule

DEFAULT_FUEL = 10_000_000
PROP_FUEL_FACTOR = 10


def default_fuel() -> int:
    """Fuel from the TSD_FUEL environment variable, falling back to 10^7 transitions."""
    value = os.environ.get("TSD_FUEL")
    if value is None or not value.strip():
        return DEFAULT_FUEL
    try:
        fuel = int(value)
    except ValueError:
        raise ValueError(f"TSD_FUEL must be an integer, got '{value}'") from None
    if fuel < 0:
        raise ValueError("TSD_FUEL must not be negative")
    return fuel


class ValidateLevel(str, Enum):
    OFF = "off"
    COMMIT = "commit"
    EVERY_STEP = "every-step"

    def __str__(self):
        return self.value


class RunConfig(BaseModel):
    fuel: int = Field(default_factory=default_fuel, ge=0, description="Maximum main-token transitions.")
    schedule: Schedule = Field(default_factory=Schedule, description="Prop-token schedule.")
    validate_level: ValidateLevel = Field(default=ValidateLevel.OFF, description="When validity checks run.")
    trace_path: Path | None = Field(default=None, description="JSONL trace output.")
    dot_path: Path | None = Field(default=None, description="DOT output.")
    initial_dot_path: Path | None = Field(default=None, description="DOT output of the graph before the run.")
    step_returns_bool: bool = Field(default=False, description="step returns 1/0 instead of the update count.")
    seed: int = Field(default=0, description="Seed for generators and random schedules.")
    prop_fuel_factor: int = Field(default=PROP_FUEL_FACTOR, ge=1, description="Per-token fuel = factor * nodes.")


class BenchSpec(BaseModel):
    shape: Literal["chain", "tree", "field", "fold", "map", "alt-sum"]
    size: int = Field(..., ge=1, le=100_000)
    steps: int = Field(default=1, ge=0)
