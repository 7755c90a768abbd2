from tsd_machine.tsd_types import BINARY_OPS, App, If, IntLit, Lam, Op, Rec, Term, UnitLit, Var

# binding strength: 0 binders and sequencing, 1..5 infix levels, 6 application, 7 atoms
_INFIX_LEVEL = {"||": 1, "&&": 2, "==": 3, "<>": 3, "<=": 3, "<": 3, "+": 4, "-": 4, "*": 5, "/": 5, "%": 5}
_NON_ASSOCIATIVE = {"==", "<>", "<=", "<"}


def pretty(term: Term) -> str:
    """
    Render a Term as program text. parse(pretty(t)) == t for every Term.
    `(λx.u) t` is rendered as `let x = t in u` and `(λ_.u) t` as `t; u`, both desugar back to the same Term.
    """
    return _pretty(term, 0)


def _wrap(text: str, level: int, required: int) -> str:
    return f"({text})" if level < required else text


def _binder(name: str, annotation) -> str:
    return f"{name}:{annotation}" if annotation is not None else name


def _pretty(term: Term, required: int) -> str:
    match term:
        case Var(name=name):
            return name
        case IntLit(value=value):
            return str(value) if value >= 0 else f"(-{-value})"
        case UnitLit():
            return "()"
        case Op(opname=opname):
            return f"({opname})" if opname in BINARY_OPS else opname
        case App(fn=App(fn=Op(opname=opname), arg=left), arg=right) if opname in BINARY_OPS:
            level = _INFIX_LEVEL[opname]
            left_level = level + 1 if opname in _NON_ASSOCIATIVE else level
            text = f"{_pretty(left, left_level)} {opname} {_pretty(right, level + 1)}"
            return _wrap(text, level, required)
        case App(fn=Lam(name="_", body=body, annotation=None), arg=arg):
            return _wrap(f"{_pretty(arg, 1)}; {_pretty(body, 0)}", 0, required)
        case App(fn=Lam(name=name, body=body, annotation=annotation), arg=arg):
            text = f"let {_binder(name, annotation)} = {_pretty(arg, 0)} in {_pretty(body, 0)}"
            return _wrap(text, 0, required)
        case App(fn=fn, arg=arg):
            return _wrap(f"{_pretty(fn, 6)} {_pretty(arg, 7)}", 6, required)
        case Lam(name=name, body=body, annotation=annotation):
            return _wrap(f"λ{_binder(name, annotation)}. {_pretty(body, 0)}", 0, required)
        case Rec(name=name, body=body, annotation=annotation):
            return _wrap(f"rec {_binder(name, annotation)}. {_pretty(body, 0)}", 0, required)
        case If(cond=cond, then=then, else_=otherwise):
            text = f"if {_pretty(cond, 0)} then {_pretty(then, 0)} else {_pretty(otherwise, 0)}"
            return _wrap(text, 0, required)
    raise TypeError(f"not a term: {term!r}")
