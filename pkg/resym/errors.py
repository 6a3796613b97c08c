"""
errors.py - Exception hierarchy shared by every module.

Each error carries the process exit code the CLI maps it to:
  1 malformed input, 2 failed precondition, 3 search budget exhausted,
  4 corpus I/O, 5 internal invariant violation.
"""

from typing import Any, Dict, List, Optional


class ResymError(Exception):
    exit_code = 1


class InvalidInputError(ResymError):
    """Malformed argument, mixed-field operands, unparsable word."""

    exit_code = 1

    def __init__(self, message: str, position: Optional[int] = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class PreconditionError(ResymError):
    """A mathematical precondition failed; `failed` names every failing clause."""

    exit_code = 2

    def __init__(self, failed: List[str], message: str = ""):
        super().__init__(message or "precondition failed: " + ", ".join(failed))
        self.failed = list(failed)


class BudgetExhausted(ResymError):
    exit_code = 3

    def __init__(self, what: str, budget: int):
        super().__init__(f"{what}: search budget {budget} exhausted")
        self.what = what
        self.budget = budget


class CorpusIOError(ResymError):
    exit_code = 4


class InvariantViolation(ResymError):
    """A checker or a runtime assertion of the construction failed."""

    exit_code = 5

    def __init__(self, message: str, dump: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.dump = dump or {}


class NormalizationError(InvariantViolation):
    pass


class OrderClosureError(InvariantViolation):
    pass
