"""Exception hierarchy shared across the pics package."""

from __future__ import annotations


class PicsError(Exception):
    """Base class for all errors raised by this package."""


class IoError(PicsError):
    """Filesystem read/write failure (wraps the underlying OSError)."""


class ParseError(PicsError):
    """Malformed persisted data; carries the offending line/row when known."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class InvariantViolation(PicsError):
    """A record or catalog no longer satisfies its declared invariants."""


class DisplayNameCollision(InvariantViolation):
    """Two distinct records would share one display name."""


class CaptionerError(PicsError):
    """Base class for caption backend failures."""


class BackendUnavailable(CaptionerError):
    """Backend process could not be spawned or endpoint not reached."""


class BackendTimeout(CaptionerError):
    """Backend did not answer within the configured timeout."""


class EmptyCaption(CaptionerError):
    """Raw backend output cleaned down to an empty string."""


class FixtureMiss(CaptionerError):
    """Mock backend has no fixture entry for the requested image."""


class UnparseableVerdict(CaptionerError):
    """Readability reply contained neither YES nor NO."""


class CaptionUnusable(PicsError):
    """Caption yields an empty slug, so no filename can be derived."""


class MissingColumn(PicsError):
    """Annotation file header lacks a required column."""

    def __init__(self, column: str):
        super().__init__(f"missing column: {column}")
        self.column = column


class EmptyQuery(PicsError):
    """No query terms survived tokenization."""


class StaleIndex(PicsError):
    """Index was built from a different catalog state."""
