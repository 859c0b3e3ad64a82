"""
LPStream: Exception Hierarchy

Every error raised on purpose by the toolkit derives from LpStreamError so the
CLI can map it to exit code 1 in one place.
"""


class LpStreamError(Exception):
    """Base class for all toolkit errors."""
    pass


class UsageError(LpStreamError):
    """Raised when parameters are out of range or inconsistent."""
    pass


class SketchUsageError(UsageError):
    """Raised on out-of-range sketch indices or merging sketches with different configs."""
    pass


class NetDomainError(LpStreamError):
    """Raised when a point falls outside the region the net was built for."""
    pass


class NetTooLargeError(LpStreamError):
    """Raised when the net universe does not fit in 128 bits."""
    pass


class EmptyInputError(LpStreamError):
    """Raised when a stream (or every partition) has no live points."""
    pass


class IterationBudgetExceeded(LpStreamError):
    """Raised when the solver hits its iteration cap without an empty violator set."""
    pass


class InputBoundsError(LpStreamError):
    """Raised when an input record violates the declared bounds of its problem class."""
    pass


class StreamFormatError(LpStreamError):
    """Raised on a malformed stream line. Carries the 1-based line number."""

    def __init__(self, message: str, line_number: int = 0):
        self.line_number = line_number
        if line_number:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class ProtocolError(LpStreamError):
    """Raised when a machine answers the coordinator with the wrong amount of data."""
    pass


class UnboundedLpError(LpStreamError):
    """Raised by the simplex when the LP is unbounded (cannot happen with the box)."""
    pass


class VerifyRefusedError(LpStreamError):
    """Raised when verify mode is requested for an instance the oracles cannot handle."""
    pass
