"""Exception hierarchy.

Errors fall into two families that the command line maps to exit codes:
``DataError`` (bad or mismatched data, exit 2) and ``NumericFailure``
(divergence, overflow, failed linear algebra, exit 3). Parameter
validation errors also derive from ``ValueError``.
"""

from __future__ import annotations


class RCBenchError(Exception):
    """Base class for every error raised by the suite."""

    #: index of the experiment run that raised, when known
    run_index: int | None = None


class DataError(RCBenchError):
    pass


class NumericFailure(RCBenchError):
    pass


class LengthMismatch(DataError, ValueError):
    pass


class DimensionMismatch(DataError, ValueError):
    pass


class InvalidRange(DataError, ValueError):
    pass


class InvalidParameter(DataError, ValueError):
    pass


class ParseError(DataError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyFile(DataError):
    pass


class MissingData(DataError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"missing-data sentinel at index {index}")


class ColumnCountMismatch(DataError):
    def __init__(self, line: int, expected: int, found: int):
        self.line, self.expected, self.found = line, expected, found
        super().__init__(f"line {line}: expected {expected} columns, found {found}")


class ZeroRange(DataError, ValueError):
    def __init__(self, channel: int):
        self.channel = channel
        super().__init__(f"channel {channel} is constant; range is zero")


class ConstantTarget(DataError, ValueError):
    pass


class ZeroTarget(DataError, ValueError):
    def __init__(self, t: int):
        self.t = t
        super().__init__(f"target is zero at index {t}; MAPE undefined")


class TooShort(DataError, ValueError):
    pass


class EmptyMatrix(DataError, ValueError):
    pass


class ZeroMatrix(DataError, ValueError):
    pass


class InvalidTail(DataError, ValueError):
    pass


class EmptySuite(DataError, ValueError):
    pass


class CombinatorialBudgetExceeded(DataError, ValueError):
    pass


class ChecksumMismatch(DataError):
    pass


class DatasetNotFound(DataError, FileNotFoundError):
    pass


class Divergence(NumericFailure):
    def __init__(self, t: int, value: float | None = None):
        self.t = t
        self.value = value
        msg = f"series diverged at timestep {t}"
        if value is not None:
            msg += f" (|x| = {abs(value):.4g})"
        super().__init__(msg)


class NonFinite(NumericFailure):
    def __init__(self, t: int):
        self.t = t
        super().__init__(f"state became non-finite at step {t}")


class SpectralRadiusFailure(NumericFailure):
    pass


class SingularSystem(NumericFailure):
    pass


class DegenerateOutput(UserWarning):
    """Warned (not raised) when a trained output has zero variance."""
