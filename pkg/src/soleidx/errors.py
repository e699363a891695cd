"""Exception hierarchy.

Class names double as the error names printed by the CLI, so they follow the
domain vocabulary (``TruncatedData``, ``DuplicateId``...) rather than carrying
an ``Error`` suffix.
"""


class SoleidxError(Exception):
    """Base class for every error raised by this package."""


class DataError(SoleidxError):
    """Problem with the data being processed (CLI exit code 2)."""


class ParameterError(SoleidxError, ValueError):
    """An argument violates an operation's precondition (CLI exit code 1)."""


# --- decoding -------------------------------------------------------------


class DecodeFailed(DataError):
    pass


class MalformedHeader(DecodeFailed):
    pass


class UnsupportedVariant(DecodeFailed):
    pass


class UnsupportedMaxval(DecodeFailed):
    pass


class TruncatedData(DecodeFailed):
    pass


class UnsupportedLevels(DataError):
    pass


# --- histogram / segmentation --------------------------------------------


class EmptyImage(DataError):
    pass


class EmptyHistogram(DataError):
    pass


class DegenerateHistogram(DataError):
    pass


class ThresholdOutOfRange(ParameterError):
    pass


# --- restoration ----------------------------------------------------------


class InvalidLength(ParameterError):
    pass


class NegativeK(ParameterError):
    pass


class NegativeGamma(ParameterError):
    pass


class KernelTooLarge(DataError):
    pass


class IllConditioned(DataError):
    pass


class NonRealResult(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class IdenticalImages(DataError):
    pass


# --- catalog --------------------------------------------------------------


class DuplicateId(DataError):
    pass


class MalformedCatalog(DataError):
    pass


class InvalidQuery(ParameterError):
    pass


class InvalidRecord(ParameterError):
    pass
