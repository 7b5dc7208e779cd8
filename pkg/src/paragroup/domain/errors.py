from __future__ import annotations


class ParagroupError(Exception):
    """Base error; `reason` is a short machine-readable tag used by the CLI."""

    reason: str = "error"

    def __init__(self, message: str, *, reason: str | None = None) -> None:
        super().__init__(message)
        if reason is not None:
            self.reason = reason


class IndexRangeError(ParagroupError, ValueError):
    reason = "index_range"


class GridResolutionError(ParagroupError):
    reason = "grid_resolution"


class InvarianceError(ParagroupError):
    """Carries the largest entry off the n = 0 column and its (l, n, m)."""

    reason = "not_t3_invariant"

    def __init__(
        self,
        message: str,
        *,
        largest: float | None = None,
        where: tuple[float, float, float] | None = None,
        reason: str | None = None,
    ) -> None:
        super().__init__(message, reason=reason)
        self.largest = largest
        self.where = where


class AdmissibilityError(ParagroupError):
    reason = "admissibility"


class ConditioningError(ParagroupError):
    reason = "conditioning"


class SylvesterError(ParagroupError):
    reason = "sylvester"
