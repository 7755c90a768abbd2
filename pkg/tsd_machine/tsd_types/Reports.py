from __future__ import annotations

import re
from typing import Literal

from pydantic import BaseModel, Field, computed_field

_SCHEDULE_PATTERN = re.compile(r"^(rr|rand:(-?\d+)|par:(\d+))$")


class Schedule(BaseModel):
    """Order in which prop tokens are advanced: round-robin, seeded random picks, or a thread pool."""
    kind: Literal["rr", "rand", "par"] = "rr"
    seed: int = 0
    workers: int = 1

    def __str__(self):
        match self.kind:
            case "rand":
                return f"rand:{self.seed}"
            case "par":
                return f"par:{self.workers}"
        return "rr"

    @staticmethod
    def parse(text: str) -> Schedule:
        """
        :param text: `rr`, `rand:<seed>` or `par:<k>`
        :raises ValueError: if the text matches none of them
        """
        match = _SCHEDULE_PATTERN.match(text.strip())
        if match is None:
            raise ValueError(f"Unknown schedule '{text}', expected rr, rand:<seed> or par:<k>")
        if match.group(2) is not None:
            return Schedule(kind="rand", seed=int(match.group(2)))
        if match.group(3) is not None:
            if int(match.group(3)) < 1:
                raise ValueError("par:<k> needs at least one worker")
            return Schedule(kind="par", workers=int(match.group(3)))
        return Schedule()


class CellResult(BaseModel):
    cell: int = Field(..., description="Cell node id.")
    old: int = Field(..., description="Value before the step.")
    returned: int = Field(..., description="Value computed by the cell's prop token.")

    @computed_field
    @property
    def changed(self) -> bool:
        return self.old != self.returned


class PropReport(BaseModel):
    """Result of one propagation, cells in creation order."""
    cells: list[CellResult] = Field(default_factory=list)
    transitions_per_token: dict[int, int] = Field(default_factory=dict, description="Cell id -> prop transitions.")

    @computed_field
    @property
    def updated_count(self) -> int:
        return sum(1 for c in self.cells if c.changed)

    @property
    def total_transitions(self) -> int:
        return sum(self.transitions_per_token.values())


class Violation(BaseModel):
    predicate: str = Field(..., description="Checked clause, e.g. graph.box-form or state.flag.")
    location: str = Field(..., description="Node or port the clause failed at.")
    description: str

    def __str__(self):
        return f"[{self.predicate}] at {self.location}: {self.description}"


class ValidityReport(BaseModel):
    violations: list[Violation] = Field(default_factory=list)

    @computed_field
    @property
    def passed(self) -> bool:
        return not self.violations

    def add(self, predicate: str, location, description: str):
        self.violations.append(Violation(predicate=predicate, location=str(location), description=description))

    def extend(self, other: ValidityReport) -> ValidityReport:
        self.violations.extend(other.violations)
        return self
