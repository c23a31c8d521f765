from typing import Iterable, List, Optional


class OrliczKitError(ValueError):
    """Base class for every error raised by orlicz_kit."""


class InvalidParameter(OrliczKitError):
    pass


class InvalidInput(OrliczKitError):
    pass


class InvalidFunction(OrliczKitError):
    pass


class DimensionError(OrliczKitError):
    pass


class DomainError(OrliczKitError):
    pass


class EvaluationError(OrliczKitError):
    """A function or derivative evaluation failed at ``point``."""

    def __init__(self, message: str, point: Optional[float] = None):
        super().__init__(message)
        self.point = point


class NumericalDegeneracy(OrliczKitError):
    pass


class HypothesisViolation(OrliczKitError):
    """Raised when an Orlicz function fails a hypothesis a pipeline needs."""

    def __init__(self, message: str, violations: Optional[Iterable[str]] = None):
        super().__init__(message)
        self.violations: List[str] = list(violations or [])


class DegenerateBudget(OrliczKitError):
    pass


class CounterexampleReport(OrliczKitError):
    """Neither sign of the discriminating α separated the two norms."""

    def __init__(self, message: str, data: Optional[dict] = None):
        super().__init__(message)
        self.data = data or {}


class DistinctnessViolation(OrliczKitError):
    pass


class AlignmentImpossible(OrliczKitError):
    pass


class NotAnEmbedding(OrliczKitError):
    pass
