"""Exception types raised by spinbranch.

All of them derive from ``SpinBranchError`` (itself a ``ValueError``) so
callers can catch the whole family in one place.
"""


class SpinBranchError(ValueError):
    pass


class InvalidBranchingError(SpinBranchError):
    pass


class InvalidSizeError(SpinBranchError):
    pass


class DepthMismatchError(SpinBranchError):
    pass


class InvalidLengthError(SpinBranchError):
    pass


class InvalidScaleError(SpinBranchError):
    pass


class IncompleteNetworkError(SpinBranchError):
    pass


class SymmetryError(SpinBranchError):
    pass


class DimensionError(SpinBranchError):
    pass


class InvalidNodeError(SpinBranchError):
    pass


class ParityError(SpinBranchError):
    pass


class ImpossibleBranchError(SpinBranchError):
    pass


class UnsortedEventsError(SpinBranchError):
    pass


class UnsupportedVariantError(SpinBranchError):
    pass
