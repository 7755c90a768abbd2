from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from .PortRef import PortRef


class Direction(str, Enum):
    UP = "↑"
    DOWN = "↓"

    def __str__(self):
        return self.value


class FlagKind(str, Enum):
    NONE = "□"
    APP = "@"
    IF = "if"
    CONTRACT = "C"
    BANG = "!"
    MU = "μ"
    MAKE_CELL = "m"
    PEEK = "p"
    LINK = "l"
    ASSIGN = "a"
    ROOT = "r"
    STEP_PROPAGATE = "sp"
    STEP = "s"
    OP = "$"

    def __str__(self):
        return self.value


class RewriteFlag(BaseModel):
    """Rewrite flag of a token. `cell` is the cell in-port of l(i), a(n, i) and r(i), `value` the n of a(n, i)."""
    model_config = ConfigDict(frozen=True)

    kind: FlagKind = Field(default=FlagKind.NONE, description="Which rewrite is announced.")
    cell: PortRef | None = Field(default=None, description="Target cell in-port.")
    value: int | None = Field(default=None, description="Value to assign.")

    def __str__(self):
        match self.kind:
            case FlagKind.LINK | FlagKind.ROOT:
                return f"{self.kind}({self.cell})"
            case FlagKind.ASSIGN:
                return f"a({self.value}, {self.cell})"
        return str(self.kind)

    @property
    def is_none(self) -> bool:
        return self.kind is FlagKind.NONE

    @staticmethod
    def of(kind: FlagKind) -> "RewriteFlag":
        return _SIMPLE_FLAGS[kind]

    @staticmethod
    def link(cell: PortRef) -> "RewriteFlag":
        return RewriteFlag(kind=FlagKind.LINK, cell=cell)

    @staticmethod
    def root(cell: PortRef) -> "RewriteFlag":
        return RewriteFlag(kind=FlagKind.ROOT, cell=cell)

    @staticmethod
    def assign(value: int, cell: PortRef) -> "RewriteFlag":
        return RewriteFlag(kind=FlagKind.ASSIGN, value=value, cell=cell)


_SIMPLE_FLAGS = {kind: RewriteFlag(kind=kind) for kind in FlagKind}
NO_FLAG = _SIMPLE_FLAGS[FlagKind.NONE]


class ElemKind(str, Enum):
    STAR = "⋆"
    LAM = "λ"
    INT = "n"
    UNIT = "()"
    IF0 = "if0"
    IF1 = "if1"


class ValueTag(str, Enum):
    PLAIN = "-"
    FLOW = "g"
    CELL = "i"


class StackElem(BaseModel):
    """
    Element of the computation stack.
    Integers carry a tag: plain (-), flow (g) for values computed from cells, or cell (i) with the cell's in-port.
    """
    model_config = ConfigDict(frozen=True)

    kind: ElemKind
    value: int | None = None
    tag: ValueTag = ValueTag.PLAIN
    cell: PortRef | None = None

    def __str__(self):
        match self.kind:
            case ElemKind.INT if self.tag is ValueTag.CELL:
                return f"({self.value}, {self.cell})"
            case ElemKind.INT:
                return f"({self.value}, {self.tag.value})"
            case ElemKind.LAM | ElemKind.UNIT:
                return f"({self.kind.value}, -)"
        return self.kind.value

    @property
    def is_int(self) -> bool:
        return self.kind is ElemKind.INT

    @staticmethod
    def of_int(value: int, tag: ValueTag = ValueTag.PLAIN) -> "StackElem":
        return StackElem(kind=ElemKind.INT, value=value, tag=tag)

    @staticmethod
    def cell_ref(value: int, cell: PortRef) -> "StackElem":
        return StackElem(kind=ElemKind.INT, value=value, tag=ValueTag.CELL, cell=cell)


STAR = StackElem(kind=ElemKind.STAR)
LAM_VALUE = StackElem(kind=ElemKind.LAM)
UNIT_VALUE = StackElem(kind=ElemKind.UNIT)
IF0 = StackElem(kind=ElemKind.IF0)
IF1 = StackElem(kind=ElemKind.IF1)


class EvalToken(BaseModel):
    """
    Token state (position, direction, flag, computation stack, box stack).
    The position is always an in-port: the edge parent.o_k -> child.i_j is identified by the child's in-port.
    Stack tops are the last list elements.
    """
    position: PortRef = Field(..., description="In-port of the edge the token sits on.")
    direction: Direction = Field(default=Direction.UP, description="↑ toward dependencies, ↓ back toward the root.")
    flag: RewriteFlag = Field(default=NO_FLAG, description="Announced rewrite.")
    cstack: list[StackElem] = Field(default_factory=lambda: [STAR], description="Computation stack, top last.")
    bstack: list[PortRef] = Field(default_factory=list, description="Contraction in-ports to return through, top last.")
    origin: int | None = Field(default=None, description="Cell a prop token started from.")

    def __str__(self):
        stack = ":".join(str(e) for e in reversed(self.cstack)) or "□"
        return f"({self.position}, {self.direction}, {self.flag}, {stack}, {len(self.bstack)})"

    @property
    def top(self) -> StackElem | None:
        return self.cstack[-1] if self.cstack else None

    def clone(self) -> "EvalToken":
        return self.model_copy(update={"cstack": list(self.cstack), "bstack": list(self.bstack)})
