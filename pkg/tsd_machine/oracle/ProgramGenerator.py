import logging
import random

from tsd_machine.tsd_types import (App, ArrowType, CELL, INT, If, IntLit, Lam, Op, Rec, Term, Type, Var, apply,
                                   binop, let, seq)

logger = logging.getLogger(__name__)

_SAFE_OPS = ("+", "-", "*", "==", "<>", "<=", "<", "&&", "||")
_FUNCTION = ArrowType(domain=INT, codomain=INT)


class ProgramGenerator:
    """
    Random well-typed programs: a few cells, an optional Int -> Int function,
    a run of link / assign / step / peek commands, then an Int result.
    `program` never recurses, `recursive_program` always does.
    """

    def __init__(self, seed: int = 0, max_depth: int = 6, max_cells: int = 8):
        self.rng = random.Random(seed)
        self.max_depth = max_depth
        self.max_cells = max_cells
        self._names = 0

    def program(self) -> Term:
        env: dict[str, Type] = {}
        bindings: list[tuple[str, Term]] = []
        for _ in range(self.rng.randint(1, self.max_cells)):
            name = self._fresh("c")
            bindings.append((name, apply(Op(opname="ref"), self.int_term(self.max_depth - 3, env))))
            env[name] = CELL
        if self.rng.random() < 0.5:
            name, parameter = self._fresh("f"), self._fresh("x")
            body = self.int_term(self.max_depth - 3, {**env, parameter: INT})
            bindings.append((name, Lam(name=parameter, body=body)))
            env[name] = _FUNCTION

        commands = [self.command(env) for _ in range(self.rng.randint(1, 5))]
        term = self.int_term(self.max_depth - 2, env)
        for command in reversed(commands):
            term = seq(command, term)
        for name, bound in reversed(bindings):
            term = let(name, bound, term)
        return term

    def recursive_program(self) -> Term:
        """
        A program built around `rec f. λn. if n then ... f (n - 1) ... else e`, applied to a small
        non-negative integer. The body may read and link cells and take steps.
        """
        env: dict[str, Type] = {}
        bindings: list[tuple[str, Term]] = []
        for _ in range(self.rng.randint(1, self.max_cells)):
            name = self._fresh("c")
            bindings.append((name, apply(Op(opname="ref"), self.int_term(self.max_depth - 3, env))))
            env[name] = CELL
        function, parameter = self._fresh("f"), self._fresh("n")
        inner = {**env, parameter: INT}
        depth = self.max_depth - 3
        recursive_call = App(fn=Var(name=function), arg=binop("-", Var(name=parameter), IntLit(value=1)))
        operands = [self.int_term(depth, inner), recursive_call]
        self.rng.shuffle(operands)
        unfold = binop(self.rng.choice(("+", "-", "*")), *operands)
        if self.rng.random() < 0.4:
            unfold = seq(self.command(inner), unfold)
        body = If(cond=Var(name=parameter), then=unfold, else_=self.int_term(depth, inner))
        bindings.append((function, Rec(name=function, body=Lam(name=parameter, body=body))))

        commands = [self.command(env) for _ in range(self.rng.randint(0, 3))]
        term = App(fn=Var(name=function), arg=IntLit(value=self.rng.randint(0, 6)))
        if self.rng.random() < 0.5:
            term = binop(self.rng.choice(_SAFE_OPS), term, self.int_term(depth, env))
        for command in reversed(commands):
            term = seq(command, term)
        for name, bound in reversed(bindings):
            term = let(name, bound, term)
        return term

    def command(self, env: dict[str, Type]) -> Term:
        cell = Var(name=self._pick(env, CELL))
        depth = self.max_depth - 3
        match self.rng.choices(("link", "assign", "step", "peek"), weights=(4, 2, 4, 1))[0]:
            case "link":
                return apply(Op(opname="link"), cell, self.int_term(depth, env))
            case "assign":
                return apply(Op(opname="assign"), cell, self.int_term(depth, env))
            case "step":
                return Op(opname="step")
        return apply(Op(opname="peek"), self.int_term(depth, env))

    def int_term(self, depth: int, env: dict[str, Type]) -> Term:
        has = {t: any(bound == t for bound in env.values()) for t in (INT, CELL, _FUNCTION)}
        options = {"literal": 3, "var": 3 if has[INT] else 0, "deref": 4 if has[CELL] else 0}
        if depth > 0:
            options |= {"binop": 3, "divide": 1, "if": 2, "peek": 1, "step": 1, "root": 1 if has[CELL] else 0,
                        "call": 2 if has[_FUNCTION] else 0, "let": 1}
        kinds = [kind for kind, weight in options.items() if weight]
        kind = self.rng.choices(kinds, weights=[options[k] for k in kinds])[0]
        match kind:
            case "literal":
                return IntLit(value=self.rng.randint(-3, 9))
            case "var":
                return Var(name=self._pick(env, INT))
            case "deref" | "root":
                return apply(Op(opname=kind), Var(name=self._pick(env, CELL)))
            case "binop":
                return binop(self.rng.choice(_SAFE_OPS), self.int_term(depth - 1, env), self.int_term(depth - 1, env))
            case "divide":
                divisor = IntLit(value=self.rng.choice((-3, -2, 2, 3, 5)))
                return binop(self.rng.choice(("/", "%")), self.int_term(depth - 1, env), divisor)
            case "if":
                return If(cond=self.int_term(depth - 1, env), then=self.int_term(depth - 1, env),
                          else_=self.int_term(depth - 1, env))
            case "peek":
                return apply(Op(opname="peek"), self.int_term(depth - 1, env))
            case "step":
                return Op(opname="step")
            case "call":
                return App(fn=Var(name=self._pick(env, _FUNCTION)), arg=self.int_term(depth - 1, env))
        name = self._fresh("v")
        return let(name, self.int_term(depth - 1, env), self.int_term(depth - 1, {**env, name: INT}))

    def _pick(self, env: dict[str, Type], wanted: Type) -> str:
        return self.rng.choice(sorted(name for name, t in env.items() if t == wanted))

    def _fresh(self, prefix: str) -> str:
        self._names += 1
        return f"{prefix}{self._names}"


def generate_programs(count: int, seed: int = 0, max_depth: int = 6, max_cells: int = 8,
                      recursive: bool = False) -> list[Term]:
    generator = ProgramGenerator(seed, max_depth, max_cells)
    make = generator.recursive_program if recursive else generator.program
    programs = [make() for _ in range(count)]
    logger.debug("generated %d programs with seed %d", count, seed)
    return programs
