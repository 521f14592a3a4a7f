"""Exception hierarchy shared by every module of the package."""


class BsppccError(Exception):
    """Base class for all package errors."""


class DomainError(BsppccError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class DataError(BsppccError, ValueError):
    """An observation is unusable (non-positive, non-finite, unparsable)."""

    def __init__(self, message, index=None, line=None):
        super().__init__(message)
        self.index = index
        self.line = line


class SampleSizeError(DataError):
    """Too few observations to compute the statistic."""


class DegenerateDataError(BsppccError, ValueError):
    """The probability plot has zero spread on one axis."""


class OutOfRangeError(BsppccError, ValueError):
    """Sample size outside the rows covered by a critical-value table."""


class LevelError(BsppccError, ValueError):
    """Significance level not present in a critical-value table."""


class TableFormatError(BsppccError, ValueError):
    """A table file violates the line-oriented table format."""


class IntegrityError(BsppccError):
    """The embedded reference table failed its checksum."""


class CapacityError(BsppccError, MemoryError):
    """A simulation would not fit in memory; use the chunked quantile path."""
