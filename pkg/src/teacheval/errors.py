"""Exception taxonomy shared across the package."""

from __future__ import annotations


class TeachevalError(Exception):
    """Base class for all errors raised by this package.

    ``location`` points at the offending spot in an input document
    (e.g. ``"row 7"`` or ``"groups[2].items[1]"``) when one is known.
    """

    def __init__(self, message: str, *, location: str | None = None):
        super().__init__(message)
        self.location = location

    def __str__(self) -> str:
        base = super().__str__()
        if self.location:
            return f"{base} (at {self.location})"
        return base


class SchemaFormatError(TeachevalError):
    """A questionnaire schema document is malformed or violates an invariant."""


class RevisionError(TeachevalError):
    """A revision sequence cannot be applied to a schema."""


class DataFormatError(TeachevalError):
    """A profile, response, or delivery document is malformed."""


class AnalyticsError(TeachevalError):
    """A statistics request cannot be answered for the given dataset."""


class WeightError(TeachevalError):
    """A weight vector is malformed or cannot be derived."""


class ScoringError(TeachevalError):
    """An evaluatee record cannot be scored or a card set cannot be ranked."""


class ParseWarning(UserWarning):
    """Recoverable oddity in an input document (e.g. an unknown enum token)."""
