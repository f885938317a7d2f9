"""Exception hierarchy shared by the library and the command line."""


class GalError(Exception):
    """Base class for every error raised by ``gal``."""

    exit_code = 1


class ValidationError(GalError, ValueError):
    exit_code = 2


class RMarkedOutOfRange(ValidationError):
    pass


class IndexOutOfRange(ValidationError, IndexError):
    pass


class DuplicateIndex(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class NormError(ValidationError):
    pass


class NotPowerOfTwo(ValidationError):
    pass


class WorstCaseImpossible(ValidationError):
    pass


class UnknownKind(ValidationError):
    pass


class ParseError(ValidationError):
    pass


class DegenerateEllipse(GalError):
    """The mean-amplitude locus is a circle or a point, not a proper ellipse."""


class ToleranceExceeded(GalError):
    exit_code = 3


class HopelessInstance(GalError):
    """Amplification cannot raise the success probability above its constant value."""

    exit_code = 4
