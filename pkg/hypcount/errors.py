"""Exceptions raised throughout hypcount."""

from __future__ import annotations
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from hypcount.group.orbit import EnumerationStats

__all__ = [
    "BudgetExceededError",
    "ClassificationError",
    "ContainmentError",
    "DimensionMismatchError",
    "FreenessError",
    "HypcountError",
    "InsufficientDataError",
    "ParameterError",
    "UndefinedProjectionError",
    "UnsupportedStabilizerError",
    "ValidationError",
]


class HypcountError(Exception):
    """Base class of every error raised by hypcount."""


class DimensionMismatchError(HypcountError, ValueError):
    """Operands live in hyperbolic spaces of different dimension."""


class ParameterError(HypcountError, ValueError):
    """A numeric argument lies outside its admissible range."""


class ClassificationError(HypcountError):
    """An operation requires an isometry of a different type (e.g. a loxodromic)."""


class ContainmentError(HypcountError):
    """A projection target lies inside the closed convex body."""


class UndefinedProjectionError(HypcountError):
    """A boundary target coincides with an ideal point of the body."""


class BudgetExceededError(HypcountError):
    """Orbit enumeration visited more nodes than the configured budget allows.

    :param message: Human-readable description.
    :param stats: Statistics of the (partial) traversal.
    """

    def __init__(self, message: str, *, stats: EnumerationStats) -> None:
        super().__init__(message)
        self.stats = stats


class InsufficientDataError(HypcountError):
    """Too few samples to carry out an estimate."""


class UnsupportedStabilizerError(HypcountError):
    """Stabilizers must be trivial or cyclic, generated by a cyclically reduced word."""


class ValidationError(HypcountError, ValueError):
    """Invalid group, body or family description.

    :param message: Human-readable description.
    :param details: Machine-readable context, emitted verbatim in CLI error reports.
    """

    def __init__(self, message: str, *, details: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.details = {} if details is None else dict(details)


class FreenessError(ValidationError):
    """A short nonempty reduced word evaluates to the identity."""
