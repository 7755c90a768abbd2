from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class NodeTag(str, Enum):
    LAM = "λ"
    APP = "@"
    CONST = "n"
    UNIT = "()"
    BINOP = "$"
    IF = "if"
    REC = "μ"
    BANG = "!"
    QUERY = "?"
    CONTRACTION = "C"
    CELL = "{n}"
    STEP = "s"
    PEEK = "p"
    MAKE_CELL = "m"
    ROOT = "r"
    DEREF = "d"
    ASSIGN = "a"
    LINK = "l"

    def __str__(self):
        return self.value


# (in-port count, out-port count); contractions have a variable in-port count
ARITY: dict[NodeTag, tuple[int, int]] = {
    NodeTag.LAM: (2, 1),
    NodeTag.REC: (2, 1),
    NodeTag.APP: (1, 2),
    NodeTag.CONST: (1, 0),
    NodeTag.UNIT: (1, 0),
    NodeTag.BINOP: (1, 2),
    NodeTag.IF: (1, 3),
    NodeTag.BANG: (1, 1),
    NodeTag.QUERY: (1, 1),
    NodeTag.CONTRACTION: (0, 1),
    NodeTag.CELL: (1, 1),
    NodeTag.STEP: (1, 0),
    NodeTag.PEEK: (1, 1),
    NodeTag.MAKE_CELL: (1, 1),
    NodeTag.ROOT: (1, 1),
    NodeTag.DEREF: (1, 1),
    NodeTag.ASSIGN: (1, 2),
    NodeTag.LINK: (1, 2),
}

UNARY_TAGS = frozenset({NodeTag.PEEK, NodeTag.MAKE_CELL, NodeTag.ROOT, NodeTag.DEREF})
# node kinds a prop token may visit
DATAFLOW_TAGS = frozenset({NodeTag.CONST, NodeTag.CELL, NodeTag.DEREF, NodeTag.BINOP, NodeTag.IF, NodeTag.BANG,
                           NodeTag.CONTRACTION})
PRIMITIVE_TAGS = {"ref": NodeTag.MAKE_CELL, "deref": NodeTag.DEREF, "root": NodeTag.ROOT, "peek": NodeTag.PEEK,
                  "link": NodeTag.LINK, "assign": NodeTag.ASSIGN, "step": NodeTag.STEP}


class NodeKind(BaseModel):
    """Label of a node. `value` is set for Const and Cell, `opname` for BinOp, `fan_in` for Contraction."""
    model_config = ConfigDict(frozen=True)

    tag: NodeTag = Field(..., description="Node label.")
    value: int | None = Field(default=None, description="Stored integer of a Const or Cell node.")
    opname: str | None = Field(default=None, description="Operator of a BinOp node.")
    fan_in: int = Field(default=0, description="Initial number of in-ports of a Contraction node.")

    def __str__(self):
        match self.tag:
            case NodeTag.CONST:
                return str(self.value)
            case NodeTag.CELL:
                return f"{{{self.value}}}"
            case NodeTag.BINOP:
                return self.opname
            case NodeTag.CONTRACTION:
                return f"C{self.fan_in}" if self.fan_in != 1 else "C"
        return self.tag.value

    @staticmethod
    def const(value: int) -> "NodeKind":
        return NodeKind(tag=NodeTag.CONST, value=value)

    @staticmethod
    def cell(value: int) -> "NodeKind":
        return NodeKind(tag=NodeTag.CELL, value=value)

    @staticmethod
    def binop(opname: str) -> "NodeKind":
        return NodeKind(tag=NodeTag.BINOP, opname=opname)

    @staticmethod
    def contraction(fan_in: int) -> "NodeKind":
        return NodeKind(tag=NodeTag.CONTRACTION, fan_in=fan_in)

    @staticmethod
    def of(tag: NodeTag) -> "NodeKind":
        return NodeKind(tag=tag)
