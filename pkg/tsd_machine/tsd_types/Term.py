from __future__ import annotations

from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field

from .Type import Type

BINARY_OPS = ("+", "-", "*", "/", "%", "==", "<>", "<=", "<", "&&", "||")
UNARY_PRIMITIVES = ("ref", "deref", "root", "peek")
BINARY_PRIMITIVES = ("link", "assign")
NULLARY_PRIMITIVES = ("step",)
PRIMITIVES = UNARY_PRIMITIVES + BINARY_PRIMITIVES + NULLARY_PRIMITIVES
OPNAMES = BINARY_OPS + PRIMITIVES


class _TermBase(BaseModel):
    model_config = ConfigDict(frozen=True)


class Var(_TermBase):
    kind: Literal["var"] = "var"
    name: str


class Lam(_TermBase):
    kind: Literal["lam"] = "lam"
    name: str
    body: Term
    annotation: Type | None = Field(default=None, description="Optional binder type.")


class App(_TermBase):
    kind: Literal["app"] = "app"
    fn: Term
    arg: Term


class IntLit(_TermBase):
    kind: Literal["int"] = "int"
    value: int


class UnitLit(_TermBase):
    kind: Literal["unit"] = "unit"


class Op(_TermBase):
    kind: Literal["op"] = "op"
    opname: str = Field(..., description="One of OPNAMES.")


class If(_TermBase):
    kind: Literal["if"] = "if"
    cond: Term
    then: Term
    else_: Term = Field(..., alias="else")

    model_config = ConfigDict(frozen=True, populate_by_name=True)


class Rec(_TermBase):
    kind: Literal["rec"] = "rec"
    name: str
    body: Term
    annotation: Type | None = Field(default=None, description="Optional type of the recursive binder.")


Term = Annotated[Union[Var, Lam, App, IntLit, UnitLit, Op, If, Rec], Field(discriminator="kind")]

for _model in (Lam, App, If, Rec):
    _model.model_rebuild()


def apply(fn: Term, *args: Term) -> Term:
    for arg in args:
        fn = App(fn=fn, arg=arg)
    return fn


def binop(opname: str, left: Term, right: Term) -> Term:
    return apply(Op(opname=opname), left, right)


def let(name: str, bound: Term, body: Term) -> Term:
    """`let x = t in u` is `(λx.u) t`."""
    return App(fn=Lam(name=name, body=body), arg=bound)


def seq(first: Term, second: Term) -> Term:
    """`t; u` is `(λ_.u) t`."""
    return App(fn=Lam(name="_", body=second), arg=first)


def free_variables(term: Term) -> set[str]:
    match term:
        case Var(name=name):
            return {name}
        case Lam(name=name, body=body) | Rec(name=name, body=body):
            return free_variables(body) - {name}
        case App(fn=fn, arg=arg):
            return free_variables(fn) | free_variables(arg)
        case If(cond=c, then=t, else_=e):
            return free_variables(c) | free_variables(t) | free_variables(e)
        case _:
            return set()


def term_size(term: Term) -> int:
    match term:
        case Lam(body=body) | Rec(body=body):
            return 1 + term_size(body)
        case App(fn=fn, arg=arg):
            return 1 + term_size(fn) + term_size(arg)
        case If(cond=c, then=t, else_=e):
            return 1 + term_size(c) + term_size(t) + term_size(e)
        case _:
            return 1
