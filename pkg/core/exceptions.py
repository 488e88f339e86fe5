"""Exception hierarchy for QUARK.

Every error carries an exit code so the command-line surface can map it
without knowing the concrete class.
"""
from typing import Iterable, Optional, Sequence

from core.constants import ExitCode


class QuarkError(Exception):
    """Base class for all QUARK errors."""
    exit_code = ExitCode.INTERNAL_ERROR


class ShapeError(QuarkError):
    """Operand shapes do not agree."""

    def __init__(self, op: str, *shapes: Sequence[int]):
        self.op = op
        self.shapes = [tuple(s) for s in shapes]
        described = " and ".join(str(s) for s in self.shapes)
        super().__init__(f"{op}: incompatible shapes {described}")


class ContractError(QuarkError):
    """A precondition of an operation was violated."""


class NonFiniteError(QuarkError):
    """A gradient or loss term became NaN/Inf."""

    def __init__(self, what: str, name: str):
        self.what = what
        self.name = name
        super().__init__(f"non-finite {what} in '{name}'")


class ConfigError(QuarkError):
    """Invalid configuration or hyperparameter combination."""
    exit_code = ExitCode.USER_ERROR


class SamplingError(QuarkError):
    """Not enough catalog items to draw training pairs."""
    exit_code = ExitCode.USER_ERROR

    def __init__(self, label: str, needed: int, available: int, side: str):
        self.label = label
        super().__init__(
            f"class '{label}': need {needed} {side} items, only {available} available"
        )


class EvaluationError(QuarkError):
    """The candidate protocol cannot be satisfied."""
    exit_code = ExitCode.USER_ERROR

    def __init__(self, message: str, classes: Optional[Iterable[str]] = None):
        self.classes = sorted(classes or [])
        if self.classes:
            message = f"{message}: {', '.join(self.classes)}"
        super().__init__(message)


class FormatError(QuarkError):
    """An input file violates its format."""
    exit_code = ExitCode.USER_ERROR

    def __init__(self, path: str, message: str, line: Optional[int] = None):
        self.path = path
        self.line = line
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {message}")


class ParseError(FormatError):
    """A line could not be parsed."""


class StageError(QuarkError):
    """Wraps an error raised inside a named pipeline stage."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, 'exit_code', ExitCode.INTERNAL_ERROR)
        if isinstance(cause, FileNotFoundError):
            self.exit_code = ExitCode.USER_ERROR
        super().__init__(f"[{stage}] {cause}")
