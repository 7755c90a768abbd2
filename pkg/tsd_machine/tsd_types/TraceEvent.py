from pydantic import BaseModel, Field

from .MachineState import Mode


class CellUpdate(BaseModel):
    cell: int
    old: int
    new: int


class TraceEvent(BaseModel):
    """One machine transition. Serialized as one JSONL line."""
    seq: int = Field(..., description="Transition number, from 0.")
    token: str = Field(default="main", description="main, or \"cell <id>\" for the prop token of a cell.")
    mode: Mode
    rule_id: str = Field(..., description="Stable rule name, e.g. pass.lam.i1.up, rw.beta, flow.if.sel0.")
    node_kind: str = Field(..., description="Label of the node the rule dispatched on.")
    port: str = Field(..., description="Token position before the transition.")
    direction: str
    flag: str
    cstack_depth: int
    bstack_depth: int
    graph_nodes: int
    commit: list[CellUpdate] | None = Field(default=None, description="Changed cells, on commit events only.")
