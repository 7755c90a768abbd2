"""
Reference evaluator: big-step call-by-value over terms with an explicit cell store.
It does not use the graph, the machine or their arithmetic, so the two can be checked against each other.
"""
from __future__ import annotations

import logging
from typing import Annotated, Literal, NamedTuple, Union

from pydantic import BaseModel, ConfigDict, Field

from tsd_machine.common.errors import EvaluationError
from tsd_machine.tsd_types import App, If, IntLit, Lam, Op, Rec, Term, UnitLit, Var

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_FUEL = 1_000_000


class _NetBase(BaseModel):
    model_config = ConfigDict(frozen=True)


class Const(_NetBase):
    kind: Literal["const"] = "const"
    value: int


class ReadCell(_NetBase):
    kind: Literal["read"] = "read"
    cell: int


class OpExpr(_NetBase):
    kind: Literal["op"] = "op"
    opname: str
    left: NetExpr
    right: NetExpr


class Select(_NetBase):
    kind: Literal["select"] = "select"
    cond: NetExpr
    then: NetExpr
    otherwise: NetExpr


NetExpr = Annotated[Union[Const, ReadCell, OpExpr, Select], Field(discriminator="kind")]
OpExpr.model_rebuild()
Select.model_rebuild()


class NetCell(BaseModel):
    id: int
    value: int
    dependency: NetExpr


def arithmetic(opname: str, m: int, n: int) -> int:
    if opname in ("/", "%"):
        if n == 0:
            raise EvaluationError(f"division by zero in {m} {opname} {n}", kind="division")
        quotient, remainder = divmod(m, n)
        if remainder and (m < 0) != (n < 0):
            quotient += 1
        return quotient if opname == "/" else m - quotient * n
    table = {
        "+": lambda: m + n,
        "-": lambda: m - n,
        "*": lambda: m * n,
        "==": lambda: 1 if m == n else 0,
        "<>": lambda: 0 if m == n else 1,
        "<=": lambda: 1 if m <= n else 0,
        "<": lambda: 1 if m < n else 0,
        "&&": lambda: 1 if m and n else 0,
        "||": lambda: 1 if m or n else 0,
    }
    if opname not in table:
        raise EvaluationError(f"unknown operator {opname}")
    return table[opname]()


class NetStore:
    """Cells in creation order; `step` reads every dependency before writing any cell."""

    def __init__(self):
        self.cells: list[NetCell] = []

    def new(self, value: int, dependency: NetExpr) -> int:
        self.cells.append(NetCell(id=len(self.cells), value=value, dependency=dependency))
        return len(self.cells) - 1

    def evaluate(self, expr: NetExpr) -> int:
        match expr:
            case Const(value=value):
                return value
            case ReadCell(cell=cell):
                return self.cells[cell].value
            case OpExpr(opname=opname, left=left, right=right):
                return arithmetic(opname, self.evaluate(left), self.evaluate(right))
            case Select(cond=cond, then=then, otherwise=otherwise):
                chosen_then, chosen_else = self.evaluate(then), self.evaluate(otherwise)
                return chosen_then if self.evaluate(cond) != 0 else chosen_else
        raise EvaluationError(f"bad net expression {expr}")

    def step(self) -> int:
        fresh = [self.evaluate(cell.dependency) for cell in self.cells]
        updated = 0
        for cell, value in zip(self.cells, fresh):
            if cell.value != value:
                cell.value = value
                updated += 1
        return updated

    def values(self) -> list[int]:
        return [cell.value for cell in self.cells]


# Runtime values

class IntV(NamedTuple):
    value: int
    expr: NetExpr | None = None  # set for values that depend on cells


class CellV(NamedTuple):
    cell: int


class UnitV(NamedTuple):
    pass


class Closure(NamedTuple):
    name: str
    body: Term
    env: dict


class PrimV(NamedTuple):
    opname: str
    args: tuple = ()


class _RecBinding(NamedTuple):
    term: Rec
    env: dict


_ARITY = {"ref": 1, "deref": 1, "root": 1, "peek": 1, "link": 2, "assign": 2}


def _expr(value: IntV) -> NetExpr:
    return value.expr if value.expr is not None else Const(value=value.value)


class OracleResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    value: object = Field(..., description="Final runtime value.")
    observations: list[int] = Field(default_factory=list, description="Values read by peek, in order.")
    step_counts: list[int] = Field(default_factory=list, description="Return value of every step.")
    cell_history: list[list[int]] = Field(default_factory=list, description="Cell values after every step.")
    store: NetStore = Field(..., description="Final cells.")

    @property
    def observable(self) -> tuple:
        return observable(self.value)


def observable(value) -> tuple:
    """Comparable summary of a value: ints by value, everything else by shape."""
    match value:
        case IntV(value=n):
            return "int", n
        case CellV():
            return ("cell",)
        case UnitV():
            return ("unit",)
    return ("fun",)


class Oracle:
    def __init__(self, fuel: int = DEFAULT_ORACLE_FUEL, step_returns_bool: bool = False):
        self.fuel = fuel
        self.step_returns_bool = step_returns_bool
        self.store = NetStore()
        self.observations: list[int] = []
        self.step_counts: list[int] = []
        self.cell_history: list[list[int]] = []
        self._spent = 0

    def evaluate(self, term: Term) -> OracleResult:
        try:
            value = self._eval(term, {})
        except RecursionError:
            raise EvaluationError("evaluation nested too deeply", kind="fuel") from None
        return OracleResult(value=value, observations=self.observations, step_counts=self.step_counts,
                            cell_history=self.cell_history, store=self.store)

    def _eval(self, term: Term, env: dict):
        self._spent += 1
        if self._spent > self.fuel:
            raise EvaluationError(f"out of fuel after {self.fuel} evaluation steps", kind="fuel")
        match term:
            case IntLit(value=value):
                return IntV(value)
            case UnitLit():
                return UnitV()
            case Var(name=name):
                if name not in env:
                    raise EvaluationError(f"unbound variable {name}")
                bound = env[name]
                if isinstance(bound, _RecBinding):
                    return self._eval(bound.term, bound.env)
                if isinstance(bound, IntV) and bound.expr is not None:
                    # a flow value is read off the cells as they are now
                    return IntV(self.store.evaluate(bound.expr), bound.expr)
                return bound
            case Lam(name=name, body=body):
                return Closure(name, body, env)
            case Rec(name=name, body=body):
                return self._eval(body, {**env, name: _RecBinding(term, env)})
            case Op(opname="step"):
                return self._step()
            case Op(opname=opname):
                return PrimV(opname)
            case App(fn=fn, arg=arg):
                argument = self._eval(arg, env)
                return self._apply(self._eval(fn, env), argument)
            case If(cond=cond, then=then, else_=otherwise):
                condition = self._eval(cond, env)
                if condition.expr is None:
                    return self._eval(then if condition.value != 0 else otherwise, env)
                else_value = self._eval(otherwise, env)
                then_value = self._eval(then, env)
                chosen = then_value if condition.value != 0 else else_value
                return IntV(chosen.value, Select(cond=condition.expr, then=_expr(then_value),
                                                 otherwise=_expr(else_value)))
        raise EvaluationError(f"cannot evaluate {term}")

    def _apply(self, function, argument):
        match function:
            case Closure(name=name, body=body, env=env):
                return self._eval(body, {**env, name: argument})
            case PrimV(opname=opname, args=args):
                args = args + (argument,)
                if len(args) < _ARITY.get(opname, 2):
                    return PrimV(opname, args)
                return self._primitive(opname, *args)
        raise EvaluationError(f"application of a non-function {function}")

    def _primitive(self, opname: str, *args):
        match opname, args:
            case "ref", (IntV() as initial,):
                return CellV(self.store.new(initial.value, _expr(initial)))
            case "deref", (CellV(cell=cell),):
                return IntV(self.store.cells[cell].value, ReadCell(cell=cell))
            case "root", (CellV(cell=cell),):
                dependency = self.store.cells[cell].dependency
                value = self.store.evaluate(dependency)
                return IntV(value, None if isinstance(dependency, Const) else dependency)
            case "peek", (IntV(value=value),):
                self.observations.append(value)
                return IntV(value)
            case "link", (CellV(cell=cell), IntV() as dependency):
                self.store.cells[cell].dependency = _expr(dependency)
                return UnitV()
            case "assign", (CellV(cell=cell), IntV(value=value)):
                self.store.cells[cell].value = value
                return UnitV()
            case _, (IntV() as left, IntV() as right):
                value = arithmetic(opname, left.value, right.value)
                if left.expr is None and right.expr is None:
                    return IntV(value)
                return IntV(value, OpExpr(opname=opname, left=_expr(left), right=_expr(right)))
        raise EvaluationError(f"ill-typed use of {opname}")

    def _step(self) -> IntV:
        updated = self.store.step()
        result = int(updated > 0) if self.step_returns_bool else updated
        self.step_counts.append(result)
        self.cell_history.append(self.store.values())
        logger.debug("oracle step: %d updated", updated)
        return IntV(result)


def oracle_eval(term: Term, fuel: int = DEFAULT_ORACLE_FUEL, step_returns_bool: bool = False) -> OracleResult:
    """
    Evaluate a well-typed term.
    :raises EvaluationError: on division by zero or when the fuel runs out
    """
    return Oracle(fuel, step_returns_bool).evaluate(term)
