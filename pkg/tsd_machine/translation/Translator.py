from __future__ import annotations

import logging

from pydantic import BaseModel, ConfigDict, Field

from tsd_machine.common.errors import GraphError, TranslationError, TsdError
from tsd_machine.graph import Graph
from tsd_machine.syntax import TypeEnv, parse, typecheck
from tsd_machine.tsd_types import (BINARY_OPS, PRIMITIVE_TAGS, App, If, IntLit, Lam, NodeKind, NodeTag, Op, PortRef,
                                   Rec, Term, Type, UnitLit, Var)

logger = logging.getLogger(__name__)

_ARITY = {**{op: 2 for op in BINARY_OPS}, "link": 2, "assign": 2, "ref": 1, "deref": 1, "root": 1, "peek": 1,
          "step": 0}
# not parseable as identifiers, so eta-expansion cannot capture user variables
_ETA_PREFIX = "%a"

Uses = dict[str, list[PortRef]]


class TranslationResult(BaseModel):
    """Translated graph, its root in-port and one out-port per free variable."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    graph: Graph
    root: PortRef = Field(..., description="Unpaired in-port carrying the value of the term.")
    free_var_ports: dict[str, PortRef] = Field(default_factory=dict, description="Unpaired out-port per free variable.")
    type: Type | None = Field(default=None, description="Surface type of the term, when typechecked.")

    @property
    def is_closed(self) -> bool:
        return not self.free_var_ports


class _Translator:
    def __init__(self):
        self.graph = Graph()

    def emit(self, term: Term, parent: PortRef | None, box: int | None) -> tuple[PortRef | None, Uses]:
        """
        Emit the nodes of a term below `parent` (an unconnected out-port) inside `box`.
        :return: the term's root in-port when it made one, and the dangling out-ports that use each free variable
        """
        match term:
            case Var(name=name):
                if parent is None:
                    share = self.graph.add_node(NodeKind.contraction(1), box)
                    return PortRef.i(share), {name: [PortRef.o(share)]}
                return None, {name: [parent]}
            case IntLit(value=value):
                return self._value_box(NodeKind.const(value), parent, box), {}
            case UnitLit():
                return self._value_box(NodeKind.of(NodeTag.UNIT), parent, box), {}
            case Lam(name=name, body=body):
                return self._binder_box(NodeTag.LAM, name, body, parent, box)
            case Rec(name=name, body=body):
                return self._binder_box(NodeTag.REC, name, body, parent, box)
            case If(cond=cond, then=then, else_=otherwise):
                node = self.graph.add_node(NodeKind.of(NodeTag.IF), box)
                uses = self._operands(node, [cond, otherwise, then], box)
                return self._attach(node, parent), uses
            case Op() | App():
                return self._application(term, parent, box)
        raise GraphError(f"cannot translate {term!r}")

    def _attach(self, node: int, parent: PortRef | None) -> PortRef:
        root = PortRef.i(node)
        if parent is not None:
            self.graph.connect(parent, root)
        return root

    def _operands(self, node: int, operands: list[Term], box: int | None) -> Uses:
        uses: Uses = {}
        for index, operand in enumerate(operands):
            _, operand_uses = self.emit(operand, PortRef.o(node, index), box)
            _merge(uses, operand_uses)
        return uses

    def _value_box(self, kind: NodeKind, parent: PortRef | None, box: int | None) -> PortRef:
        inner = self.graph.new_box(box)
        bang = self.graph.add_bang(inner)
        value = self.graph.add_node(kind, inner)
        self.graph.connect(PortRef.o(bang), PortRef.i(value))
        return self._attach(bang, parent)

    def _binder_box(self, tag: NodeTag, name: str, body: Term, parent: PortRef | None,
                    box: int | None) -> tuple[PortRef, Uses]:
        inner = self.graph.new_box(box)
        bang = self.graph.add_bang(inner)
        binder = self.graph.add_node(NodeKind.of(tag), inner)
        self.graph.connect(PortRef.o(bang), PortRef.i(binder, 1))
        _, body_uses = self.emit(body, PortRef.o(binder), inner)
        self.bind(body_uses.pop(name, []), PortRef.i(binder, 0), inner)
        outer_uses: Uses = {}
        for free, ports in sorted(body_uses.items()):
            door = self.graph.add_door(inner)
            self.bind(ports, PortRef.i(door), inner)
            outer_uses[free] = [PortRef.o(door)]
        return self._attach(bang, parent), outer_uses

    def bind(self, uses: list[PortRef], target: PortRef, box: int | None):
        """Join the uses of one variable onto `target`: weakening for none, a direct edge for one, else C(k)."""
        if len(uses) == 1:
            self.graph.connect(uses[0], target)
            return
        share = self.graph.add_node(NodeKind.contraction(len(uses)), box)
        for index, use in enumerate(uses):
            self.graph.connect(use, PortRef.i(share, index))
        self.graph.connect(PortRef.o(share), target)

    def _application(self, term: Term, parent: PortRef | None, box: int | None) -> tuple[PortRef, Uses]:
        head, args = _spine(term)
        if isinstance(head, Op):
            arity = _ARITY[head.opname]
            if len(args) < arity:
                return self.emit(_apply(_eta(head.opname, arity), args), parent, box)
            if len(args) > arity:
                raise GraphError(f"primitive '{head.opname}' applied to {len(args)} arguments")
            node = self.graph.add_node(_primitive_kind(head.opname), box)
            # binary operands: left at o0, right at o1; unary operand at o0
            uses = self._operands(node, args, box)
            return self._attach(node, parent), uses
        node = self.graph.add_node(NodeKind.of(NodeTag.APP), box)
        uses = self._operands(node, [term.fn, term.arg], box)
        return self._attach(node, parent), uses


def _merge(into: Uses, other: Uses):
    for name, ports in other.items():
        into.setdefault(name, []).extend(ports)


def _spine(term: Term) -> tuple[Term, list[Term]]:
    args = []
    while isinstance(term, App):
        args.append(term.arg)
        term = term.fn
    return term, list(reversed(args))


def _apply(fn: Term, args: list[Term]) -> Term:
    for arg in args:
        fn = App(fn=fn, arg=arg)
    return fn


def _eta(opname: str, arity: int) -> Term:
    names = [f"{_ETA_PREFIX}{k}" for k in range(arity)]
    body = _apply(Op(opname=opname), [Var(name=n) for n in names])
    for name in reversed(names):
        body = Lam(name=name, body=body)
    return body


def _primitive_kind(opname: str) -> NodeKind:
    if opname in BINARY_OPS:
        return NodeKind.binop(opname)
    return NodeKind.of(PRIMITIVE_TAGS[opname])


def translate(term: Term, env: TypeEnv | None = None) -> TranslationResult:
    """
    Translate a term to its initial graph. Free variables named in `env` are exposed as unpaired out-ports.
    :raises GraphError: if the term has free variables outside `env`
    """
    env = env or TypeEnv()
    translator = _Translator()
    root, uses = translator.emit(term, None, None)
    unbound = sorted(set(uses) - set(env.names()))
    if unbound:
        raise GraphError(f"open-term: unbound variables {', '.join(unbound)}")
    free_var_ports = {}
    for name in env.names():
        share = translator.graph.add_node(NodeKind.contraction(0))
        for use in uses.get(name, []):
            translator.graph.connect(use, translator.graph.add_in_port(share))
        free_var_ports[name] = PortRef.o(share)
    logger.debug("translated term into %d nodes", translator.graph.node_count())
    return TranslationResult(graph=translator.graph, root=root, free_var_ports=free_var_ports)


def translate_program(source: str) -> TranslationResult:
    """
    parse, typecheck and translate a closed program.
    :raises TranslationError: tagged with the failing stage
    """
    try:
        term = parse(source)
    except TsdError as e:
        raise TranslationError("parse", e) from e
    try:
        type_ = typecheck(term)
    except TsdError as e:
        raise TranslationError("typecheck", e) from e
    try:
        result = translate(term)
    except TsdError as e:
        raise TranslationError("translate", e) from e
    result.type = type_
    return result
