"""Exception hierarchy.

The three branches map onto the CLI exit codes: precondition failures (2),
stage failures (3) and internal invariant violations (4).
"""


class DecompositionError(Exception):
    exit_code = 1


class PreconditionError(DecompositionError):
    exit_code = 2


class GraphFormatError(PreconditionError, ValueError):
    """Malformed edge-list or decomposition document."""


class InsufficientConnectivity(PreconditionError):
    def __init__(self, required, actual, what="graph"):
        self.required = required
        self.actual = actual
        super().__init__(f"{what} is {actual}-edge-connected, need {required}")


class DivisibilityViolation(PreconditionError):
    pass


class StageError(DecompositionError):
    exit_code = 3


class PackingFailed(StageError):
    pass


class BoundedTreeSearchExhausted(StageError):
    pass


class ExtensionStarved(StageError):
    pass


class BudgetExceeded(StageError):
    pass


class ParityRepairFailed(StageError):
    def __init__(self, message, defects=()):
        self.defects = tuple(defects)
        super().__init__(message)


class StageFailure(StageError):
    """A pipeline stage failed; ``stage`` names it and ``cause`` is the original error."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")


class InternalInvariantViolation(DecompositionError):
    """A guarantee of the construction failed to hold; always a bug or a breached precondition."""

    exit_code = 4
