import logging

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedEOF, UnexpectedInput, VisitError

from tsd_machine.common.errors import TsdParseError
from tsd_machine.tsd_types import (INT, CELL, UNIT, OPNAMES, App, ArrowType, If, IntLit, Lam, Op, Rec, Term,
                                   UnitLit, Var, binop, seq)

logger = logging.getLogger(__name__)

grammar = r"""
?start: term

?term: simple ";" term                              -> seq
     | binder
     | simple

?binder: LAMBDA NAME annotation? "." term           -> lam
       | "rec" NAME annotation? "." term            -> rec
       | "let" NAME annotation? "=" term "in" term  -> let
       | "if" term "then" term "else" term          -> if_

annotation: ":" type

?type: base_type "->" type                          -> arrow_t
     | base_type
?base_type: "Int"                                   -> int_t
          | "Cell"                                  -> cell_t
          | "Unit"                                  -> unit_t
          | "(" type ")"

?simple: or_expr
?or_expr: or_expr OR and_expr                       -> infix
        | and_expr
?and_expr: and_expr AND cmp_expr                    -> infix
         | cmp_expr
?cmp_expr: add_expr CMP_OP add_expr                 -> infix
         | add_expr
?add_expr: add_expr ADD_OP mul_expr                 -> infix
         | mul_expr
?mul_expr: mul_expr MUL_OP app_expr                 -> infix
         | app_expr
?app_expr: app_expr atom                            -> app
         | atom

?atom: NAME                                         -> var
     | INT                                          -> int
     | "true"                                       -> true
     | "false"                                      -> false
     | "(" ")"                                      -> unit
     | "(" ADD_OP INT ")"                           -> negint
     | "(" operator ")"                             -> section
     | "(" term ")"

!operator: OR | AND | CMP_OP | ADD_OP | MUL_OP

LAMBDA: "λ" | "\\"
OR: "||"
AND: "&&"
CMP_OP: /==|<>|<=|</
ADD_OP: /[+\-]/
MUL_OP: /[*\/%×÷]/
NAME: /[a-zA-Z_][a-zA-Z0-9_']*/
INT: /[0-9]+/
COMMENT: /\/\/[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""

_OPERATOR_ALIASES = {"×": "*", "÷": "/"}


@v_args(inline=True)
class _TermBuilder(Transformer):
    """Builds desugared Terms bottom-up from the parse tree."""

    def seq(self, first, second):
        return seq(first, second)

    def lam(self, _kw, name, *rest):
        annotation, body = rest if len(rest) == 2 else (None, rest[0])
        return Lam(name=str(name), body=body, annotation=annotation)

    def rec(self, name, *rest):
        annotation, body = rest if len(rest) == 2 else (None, rest[0])
        return Rec(name=str(name), body=body, annotation=annotation)

    def let(self, name, *rest):
        annotation, bound, body = rest if len(rest) == 3 else (None, *rest)
        return App(fn=Lam(name=str(name), body=body, annotation=annotation), arg=bound)

    def if_(self, cond, then, otherwise):
        return If(cond=cond, then=then, else_=otherwise)

    def annotation(self, t):
        return t

    def arrow_t(self, domain, codomain):
        return ArrowType(domain=domain, codomain=codomain)

    def int_t(self):
        return INT

    def cell_t(self):
        return CELL

    def unit_t(self):
        return UNIT

    def infix(self, left, operator, right):
        opname = _OPERATOR_ALIASES.get(str(operator), str(operator))
        return binop(opname, left, right)

    def app(self, fn, arg):
        return App(fn=fn, arg=arg)

    def var(self, name):
        name = str(name)
        if name in OPNAMES:
            return Op(opname=name)
        return Var(name=name)

    def int(self, token):
        return IntLit(value=int(token))

    def negint(self, sign, token):
        if str(sign) != "-":
            raise ValueError(f"unexpected sign '{sign}' in literal")
        return IntLit(value=-int(token))

    def true(self):
        return IntLit(value=1)

    def false(self):
        return IntLit(value=0)

    def unit(self):
        return UnitLit()

    def section(self, operator):
        token = operator.children[0]
        return Op(opname=_OPERATOR_ALIASES.get(str(token), str(token)))


_parser = Lark(grammar, parser="lalr", maybe_placeholders=False)


def parse(source: str) -> Term:
    """
    Parse a program text into a desugared Term.
    :param source: program text
    :return: the Term; `let`, `;`, infix operators and primitive applications are already in core form
    :raises TsdParseError: with 1-based line and column of the offending token
    """
    try:
        tree = _parser.parse(source)
    except UnexpectedEOF as e:
        lines = source.splitlines() or [""]
        raise TsdParseError(f"unexpected end of input, expected one of {sorted(e.expected)}",
                            len(lines), len(lines[-1]) + 1) from e
    except UnexpectedInput as e:
        pos = e.pos_in_stream or 0
        line = e.line if isinstance(e.line, int) and e.line > 0 else 1
        column = e.column if isinstance(e.column, int) and e.column > 0 else 1
        raise TsdParseError(f"syntax error near {source[pos:pos + 12]!r}", line, column) from e
    try:
        term = _TermBuilder().transform(tree)
    except VisitError as e:
        raise TsdParseError(str(e.orig_exc), 1, 1) from e
    logger.debug("parsed %d characters", len(source))
    return term
