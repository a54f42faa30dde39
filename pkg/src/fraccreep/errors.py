"""Exception hierarchy shared by all fraccreep modules."""

from __future__ import annotations


class FracCreepError(Exception):
    """Base class for every error raised deliberately by this package."""


class DomainError(FracCreepError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SingularityError(DomainError):
    """Evaluation requested exactly at a singular point of a kernel."""


class InputError(FracCreepError, ValueError):
    """Malformed or inconsistent input data (grids, samples, parameters)."""


class SolverError(FracCreepError, RuntimeError):
    """Numerical failure while time-marching a solution."""

    def __init__(self, message: str, step_index: int | None = None) -> None:
        if step_index is not None:
            message = f"step {step_index}: {message}"
        super().__init__(message)
        self.step_index = step_index


class ConditionViolation(DomainError):
    """A theorem's hypothesis does not hold, so its bound is meaningless."""


class ProblemFileError(FracCreepError, ValueError):
    """A problem file failed to parse or validate.

    ``field`` names the offending entry, e.g. ``terms[1].delay``.
    """

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message
