"""Exception hierarchy shared by every romlab module."""


class RomlabError(Exception):
    """Base class for all library errors."""


class ArgumentError(RomlabError, ValueError):
    """An argument violates an operation's precondition."""


class SegmentSizeError(ArgumentError):
    """A sieve range exceeds the configured segment size limit."""


class ModulusOverflowError(ArgumentError, OverflowError):
    """A smooth modulus would not fit in 64 bits."""


class InvalidParamsError(ArgumentError):
    """Exponent data fails the reciprocal-sum conditions.

    The offending :class:`~romlab.lacunary.Violation` is kept on ``violation``.
    """

    def __init__(self, violation):
        super().__init__(violation.detail)
        self.violation = violation


class ManifestError(ArgumentError):
    """An experiment manifest is malformed or missing a required key."""
