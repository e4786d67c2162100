"""Exception types shared across the toolkit.

Everything raised on purpose derives from :class:`SplitVoteError`, so callers
(and the CLI) can distinguish validation failures from genuine bugs or I/O
problems.
"""


class SplitVoteError(Exception):
    """Base class for all toolkit errors."""


class NoVotePattern(SplitVoteError):
    """No conclusion clause with vote information was found in the text."""


class UnknownFormation(SplitVoteError):
    """Court-formation label outside Committee / Chamber / Grand Chamber."""


class UnparsableNumeral(SplitVoteError):
    """Vote-count token is neither a digit string nor a known number word."""


class EmptyInput(SplitVoteError):
    """An operation that needs at least one record received none."""


class MissingHumanLabel(SplitVoteError):
    """A record lacks the judge vote distribution required by the metric."""


class InvalidTemperature(SplitVoteError):
    """Temperature must be a positive real."""


class DimensionMismatch(SplitVoteError):
    """Feature, weight, or target shapes do not agree."""


class Diverged(SplitVoteError):
    """Training loss became non-finite."""


class DegenerateGroup(SplitVoteError):
    """A statistical group is empty or too small for the requested test."""


class MisalignedKeys(SplitVoteError):
    """Two keyed inputs do not cover the same (case_id, article) pairs."""


class ZeroVariance(SplitVoteError):
    """A sample has no variance where the statistic requires some."""


class SchemaError(SplitVoteError):
    """A record file violates the expected schema.

    Carries the 1-based line number when the problem is tied to one line.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateKey(SplitVoteError):
    """The same (case_id, article) pair occurs twice within one file."""
