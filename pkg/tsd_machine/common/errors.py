from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from tsd_machine.structure import AbstractComponent


class TsdError(ValueError):
    """Base class of every error raised by the toolchain (not by the machine: machine failures are Outcomes)."""


class TsdParseError(TsdError):
    """Syntax error in a program text. Contains line and column (1-based)."""
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")


class TsdTypeError(TsdError):
    """Type error. Contains the offending subterm."""
    def __init__(self, message: str, subterm=None):
        self.subterm = subterm
        if subterm is not None:
            from tsd_machine.syntax.Pretty import pretty
            message = f"{message} in `{pretty(subterm)}`"
        super().__init__(message)


class GraphError(TsdError):
    """Structural misuse of a graph (double connection, missing edge, open term, ...)."""


class TranslationError(TsdError):
    """Failure of one stage of parse -> typecheck -> translate. Contains the stage tag."""
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")


class PropagationError(TsdError):
    """
    A prop token exceeded its fuel or got stuck. Propagation terminates on valid graphs, so this is an invariant breach.
    `path` holds the last rules the token took, the failing one included.
    """
    def __init__(self, message: str, path: list[str]):
        self.path = path
        super().__init__(f"{message} (token path tail: {' -> '.join(path[-12:])})")


class StuckError(TsdError):
    """No transition matches the token. The driver turns it into a Stuck outcome."""


class ValidityError(TsdError):
    """A validity check failed during a run. Contains the report."""
    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(str(v) for v in report.violations[:5]))


class EvaluationError(TsdError):
    """
    Runtime error of the reference evaluator. `kind` is "division" for division by zero,
    "fuel" for running out of evaluation steps or nesting, "error" otherwise.
    """
    def __init__(self, message: str, kind: str = "error"):
        self.kind = kind
        super().__init__(message)


class ComponentParserError(ValueError):
    """Exception raised when a component string can not be parsed. Contains message."""
    def __init__(self, message: str):
        super().__init__(f"{message}")


class ComponentError(ValueError):
    """Exception raised when a pipeline component fails. Contains component name and message."""
    def __init__(self, component: AbstractComponent, message: str):
        super().__init__(f"{component.get_name()}: {message}")
