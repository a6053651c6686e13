"""Exception types shared across the package."""


class StrokelocError(Exception):
    """Base class for all errors raised by this package."""


class InvalidTargetError(StrokelocError):
    """Decode target has a non-positive dimension or frame rate."""


class StreamFormatError(StrokelocError):
    """A byte stream does not carry the expected magic/header."""


class TruncatedStreamError(StrokelocError):
    """A stream ended before the bytes promised by its header."""

    def __init__(self, message, offset=None):
        super().__init__(message)
        self.offset = offset


class InvalidBinsError(StrokelocError):
    """Histogram bin count is zero or negative."""


class ShapeError(StrokelocError):
    """Operands disagree on dimensions (bins, feature dims, vector length)."""


class FrameSizeError(StrokelocError):
    """Frame is too small for the requested descriptor layout."""


class EmptyDataError(StrokelocError):
    """A training set with zero samples was supplied."""


class LabelError(StrokelocError):
    """Labels are not binary 0/1."""


class DegenerateDataError(StrokelocError):
    """Training data contains a single class where two are required."""


class ModelVersionError(StrokelocError):
    """A serialized model carries an unsupported format version."""


class ModelParseError(StrokelocError):
    """A serialized model payload is corrupt or incomplete."""


class RangeError(StrokelocError):
    """An index lies outside the valid frame range."""


class ConsistencyError(StrokelocError):
    """Cross-referenced inputs disagree (ids, cut membership, ...)."""


class InvalidToleranceError(StrokelocError):
    """A negative matching tolerance was supplied."""


class UndefinedMeanError(StrokelocError):
    """Weighted mean requested with zero total weight."""


class InvalidConfigError(StrokelocError):
    """A configuration value violates its documented bounds."""


class WorkspaceError(StrokelocError):
    """The workspace is missing a required artifact or is not writable."""


class NotFoundError(WorkspaceError):
    """A referenced artifact (report, model, video) does not exist."""
