"""Exception types for DropComb and their command line exit codes."""
from typing import Optional

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class DropCombError(Exception):
    """Base class for all DropComb errors."""

    exit_code = EXIT_DATA


class ConfigError(DropCombError, ValueError):
    """Invalid or missing run configuration."""

    exit_code = EXIT_USAGE


class CorpusError(DropCombError, ValueError):
    """Malformed corpus, label-set or lexicon input.

    Args:
        message: Description of the problem
        line: 1-based line number in the offending file, when known
    """

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class LabelSetMismatchError(CorpusError):
    """A model and a corpus (or two models) disagree on the label inventory."""


class ShapeError(DropCombError, ValueError):
    """Operands of a tensor operation have incompatible shapes."""

    def __init__(self, op: str, *shapes: tuple) -> None:
        self.op = op
        self.shapes = shapes
        joined = ", ".join(str(tuple(s)) for s in shapes)
        super().__init__(f"{op}: incompatible shapes {joined}")


class NumericError(DropCombError, ArithmeticError):
    """A loss or gradient became non-finite."""

    exit_code = EXIT_NUMERIC

    def __init__(self, message: str, snippet_id: Optional[str] = None) -> None:
        self.snippet_id = snippet_id
        if snippet_id is not None:
            message = f"{message} (snippet {snippet_id})"
        super().__init__(message)


class InstanceTooLargeError(DropCombError, ValueError):
    """Exhaustive enumeration was asked for an instance beyond its guard."""


class CheckpointError(DropCombError):
    """A checkpoint directory is missing, incomplete or inconsistent."""
