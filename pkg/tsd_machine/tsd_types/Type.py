from __future__ import annotations

from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field


class _TypeBase(BaseModel):
    model_config = ConfigDict(frozen=True)

    def is_ground(self) -> bool:
        return not isinstance(self, ArrowType)


class IntType(_TypeBase):
    kind: Literal["Int"] = "Int"

    def __str__(self):
        return "Int"


class CellType(_TypeBase):
    kind: Literal["Cell"] = "Cell"

    def __str__(self):
        return "Cell"


class UnitType(_TypeBase):
    kind: Literal["Unit"] = "Unit"

    def __str__(self):
        return "Unit"


class ArrowType(_TypeBase):
    kind: Literal["Arrow"] = "Arrow"
    domain: Type = Field(..., description="Argument type.")
    codomain: Type = Field(..., description="Result type.")

    def __str__(self):
        left = f"({self.domain})" if isinstance(self.domain, ArrowType) else str(self.domain)
        return f"{left} -> {self.codomain}"


Type = Annotated[Union[IntType, CellType, UnitType, ArrowType], Field(discriminator="kind")]
ArrowType.model_rebuild()

INT = IntType()
CELL = CellType()
UNIT = UnitType()


def arrow(*types: Type) -> Type:
    """arrow(a, b, c) is a -> (b -> c)."""
    result = types[-1]
    for t in reversed(types[:-1]):
        result = ArrowType(domain=t, codomain=result)
    return result
