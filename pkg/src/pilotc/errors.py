"""Exception types shared across the package."""


class PilotCError(Exception):
    """Base class for all library-specific failures."""


class DataError(PilotCError):
    """Input data violates a precondition (bad CSV, duplicate timestamps, ...)."""


class FormatError(PilotCError):
    """Bytes are not a recognizable container (bad magic, version, or flags)."""


class TruncationError(PilotCError):
    """A bitstream or file ended before a complete value could be read."""


class CorruptionError(PilotCError):
    """Framing is intact but the decoded content is inconsistent."""


class QueryRangeError(PilotCError):
    """A query timestamp falls outside every sub-trajectory and outlier."""

    def __init__(self, timestamp: float):
        super().__init__(f"timestamp {timestamp!r} is outside the compressed trajectory")
        self.timestamp = timestamp
