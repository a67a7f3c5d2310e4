"""Exception types shared across the package."""


class StochHomError(Exception):
    """Base class for all package errors."""


class ComplexFormatError(StochHomError, ValueError):
    """Malformed complex, pattern or point-cloud input."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class FaceClosureError(ComplexFormatError):
    """A cell was declared without all of its faces."""


class GuardExceeded(StochHomError):
    """A desk-scale resource guard would be exceeded."""


class CacheCorruptionError(StochHomError):
    """A cached coefficient disagrees with the direct formula."""
