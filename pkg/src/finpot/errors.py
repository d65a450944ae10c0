"""Exception hierarchy shared across the package."""

__all__ = [
    "FinpotError",
    "NotSquareSummable",
    "OpValidationError",
    "UnboundedTail",
    "MalformedBlock",
    "AmbientMismatch",
    "DegenerateTolerance",
    "EigenFailure",
    "UnknownEigenvalue",
    "MalformedFile",
]


class FinpotError(Exception):
    """Base class for all errors raised by this package."""


class NotSquareSummable(FinpotError):
    """A tail sequence fails the square-summability criterion.

    Raised by every inner-product and norm path; such sequences stay
    constructible so that unbounded operators can be represented and
    then rejected by validation.
    """


class OpValidationError(FinpotError):
    """An operator fails structural validation (construction or parse)."""


class UnboundedTail(OpValidationError):
    """A rank-one factor carries a non-square-summable tail."""

    def __init__(self, term_index: int, side: str, detail: str = ""):
        self.term_index = term_index
        self.side = side
        msg = f"rank-one term {term_index}: {side} factor has a non-square-summable tail"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class MalformedBlock(OpValidationError):
    """The finite block is not a square matrix of finite complex entries."""


class AmbientMismatch(OpValidationError):
    """Operands live in different ambient spaces, or data exceeds a finite ambient."""


class DegenerateTolerance(FinpotError):
    """A rank or polynomial decision is ambiguous at the working tolerance."""

    def __init__(self, message: str, condition: float | None = None):
        self.condition = condition
        if condition is not None:
            message += f" (condition estimate {condition:.3e})"
        super().__init__(message)


class EigenFailure(FinpotError):
    """Eigenvalue clustering or multiplicity counts are inconsistent at tolerance."""


class UnknownEigenvalue(FinpotError):
    """A requested point is not in the computed nonzero spectrum."""


class MalformedFile(FinpotError):
    """An operator file violates the JSON schema.

    ``where`` is a JSON-path-like location of the offending element.
    """

    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")
