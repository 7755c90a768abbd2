from __future__ import annotations

import itertools
import logging

from tsd_machine.common.errors import TsdTypeError
from tsd_machine.tsd_types import (INT, CELL, UNIT, BINARY_OPS, App, ArrowType, If, IntLit, Lam,
                                   Op, Rec, Term, Type, UnitLit, Var, arrow)

logger = logging.getLogger(__name__)

PRIMITIVE_SIGNATURES: dict[str, Type] = {
    "ref": arrow(INT, CELL),
    "deref": arrow(CELL, INT),
    "root": arrow(CELL, INT),
    "link": arrow(CELL, INT, UNIT),
    "assign": arrow(CELL, INT, UNIT),
    "peek": arrow(INT, INT),
    "step": INT,
}
for _op in BINARY_OPS:
    PRIMITIVE_SIGNATURES[_op] = arrow(INT, INT, INT)


class TypeEnv:
    """Ordered map from variable name to Type. Later bindings shadow earlier ones."""

    def __init__(self, bindings: tuple[tuple[str, object], ...] = ()):
        self._bindings = bindings

    def extend(self, name: str, t) -> TypeEnv:
        return TypeEnv(self._bindings + ((name, t),))

    def lookup(self, name: str):
        for bound, t in reversed(self._bindings):
            if bound == name:
                return t
        return None

    def names(self) -> list[str]:
        seen = []
        for name, _ in self._bindings:
            if name not in seen:
                seen.append(name)
        return seen

    def items(self) -> list[tuple[str, object]]:
        return [(name, self.lookup(name)) for name in self.names()]

    def __len__(self):
        return len(self.names())

    @staticmethod
    def of(mapping: dict[str, Type]) -> TypeEnv:
        return TypeEnv(tuple(mapping.items()))


class _TVar:
    __slots__ = ("id",)

    def __init__(self, ident: int):
        self.id = ident

    def __repr__(self):
        return f"'t{self.id}"


class _Arrow:
    __slots__ = ("domain", "codomain")

    def __init__(self, domain, codomain):
        self.domain = domain
        self.codomain = codomain


class _Unifier:
    """Monomorphic first-order unification over Int, Cell, Unit, arrows and type variables."""

    def __init__(self):
        self._counter = itertools.count()
        self._subst: dict[int, object] = {}

    def fresh(self) -> _TVar:
        return _TVar(next(self._counter))

    def lift(self, t: Type):
        if isinstance(t, ArrowType):
            return _Arrow(self.lift(t.domain), self.lift(t.codomain))
        return t

    def walk(self, t):
        while isinstance(t, _TVar) and t.id in self._subst:
            t = self._subst[t.id]
        return t

    def occurs(self, var: _TVar, t) -> bool:
        t = self.walk(t)
        if isinstance(t, _TVar):
            return t.id == var.id
        if isinstance(t, _Arrow):
            return self.occurs(var, t.domain) or self.occurs(var, t.codomain)
        return False

    def unify(self, a, b, where: Term):
        a, b = self.walk(a), self.walk(b)
        if isinstance(a, _TVar) and isinstance(b, _TVar) and a.id == b.id:
            return
        if isinstance(a, _TVar):
            if self.occurs(a, b):
                raise TsdTypeError(f"infinite type {self.show(a)} = {self.show(b)}", where)
            self._subst[a.id] = b
            return
        if isinstance(b, _TVar):
            self.unify(b, a, where)
            return
        if isinstance(a, _Arrow) and isinstance(b, _Arrow):
            self.unify(a.domain, b.domain, where)
            self.unify(a.codomain, b.codomain, where)
            return
        if type(a) is type(b) and not isinstance(a, _Arrow):
            return
        raise TsdTypeError(f"type mismatch: expected {self.show(b)}, found {self.show(a)}", where)

    def resolve(self, t) -> Type:
        """Fully substitute t; unconstrained variables default to Int."""
        t = self.walk(t)
        if isinstance(t, _TVar):
            return INT
        if isinstance(t, _Arrow):
            return ArrowType(domain=self.resolve(t.domain), codomain=self.resolve(t.codomain))
        return t

    def show(self, t) -> str:
        t = self.walk(t)
        if isinstance(t, _TVar):
            return repr(t)
        if isinstance(t, _Arrow):
            domain = self.show(t.domain)
            if isinstance(self.walk(t.domain), _Arrow):
                domain = f"({domain})"
            return f"{domain} -> {self.show(t.codomain)}"
        return str(t)


def infer_type(env: TypeEnv, term: Term) -> Type:
    """
    Infer the simple type of a term.
    Binder annotations are optional, types are solved by unification (no generalisation) and
    leftover variables default to Int.
    :raises TsdTypeError: on mismatch, unbound variable, or if-branches of arrow type
    """
    unifier = _Unifier()
    ground_checks: list[tuple[Term, object]] = []
    lifted = TypeEnv(tuple((name, unifier.lift(t)) for name, t in env.items()))
    result = _infer(unifier, lifted, term, ground_checks)
    for where, t in ground_checks:
        resolved = unifier.resolve(t)
        if not resolved.is_ground():
            raise TsdTypeError(f"if-branches must have a ground type (Int, Cell or Unit), found {resolved}", where)
    return unifier.resolve(result)


def typecheck(term: Term) -> Type:
    """Type of a closed program."""
    return infer_type(TypeEnv(), term)


def _infer(u: _Unifier, env: TypeEnv, term: Term, ground_checks: list) -> object:
    match term:
        case Var(name=name):
            t = env.lookup(name)
            if t is None:
                raise TsdTypeError(f"unbound variable '{name}'", term)
            return t
        case IntLit():
            return INT
        case UnitLit():
            return UNIT
        case Op(opname=opname):
            if opname not in PRIMITIVE_SIGNATURES:
                raise TsdTypeError(f"unknown operator '{opname}'", term)
            return u.lift(PRIMITIVE_SIGNATURES[opname])
        case Lam(name=name, body=body, annotation=annotation):
            domain = u.lift(annotation) if annotation is not None else u.fresh()
            codomain = _infer(u, env.extend(name, domain), body, ground_checks)
            return _Arrow(domain, codomain)
        case App(fn=fn, arg=arg):
            fn_type = _infer(u, env, fn, ground_checks)
            arg_type = _infer(u, env, arg, ground_checks)
            result = u.fresh()
            u.unify(fn_type, _Arrow(arg_type, result), term)
            return result
        case If(cond=cond, then=then, else_=otherwise):
            u.unify(_infer(u, env, cond, ground_checks), INT, cond)
            branch = _infer(u, env, then, ground_checks)
            u.unify(_infer(u, env, otherwise, ground_checks), branch, term)
            ground_checks.append((term, branch))
            return branch
        case Rec(name=name, body=body, annotation=annotation):
            self_type = _Arrow(u.fresh(), u.fresh())
            if annotation is not None:
                u.unify(self_type, u.lift(annotation), term)
            body_type = _infer(u, env.extend(name, self_type), body, ground_checks)
            u.unify(body_type, self_type, term)
            return self_type
    raise TsdTypeError(f"not a term: {term!r}")


