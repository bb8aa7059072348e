"""Exception types shared across the package."""


class FFSalemError(ValueError):
    """Base class for all package errors."""


class NotPrime(FFSalemError):
    pass


class DegreeZero(FFSalemError):
    pass


class FieldTooLarge(FFSalemError):
    pass


class DivisionByZero(FFSalemError, ZeroDivisionError):
    pass


class ContextMismatch(FFSalemError):
    pass


class DimensionMismatch(FFSalemError):
    pass


class DimensionZero(FFSalemError):
    pass


class BadDimensionSplit(FFSalemError):
    pass


class BadDimensions(FFSalemError):
    pass


class BadDimension(FFSalemError):
    pass


class TooManySubspaces(FFSalemError):
    pass


class ZeroFrequency(FFSalemError):
    pass


class EvenCharacteristic(FFSalemError):
    pass


class TooMany(FFSalemError):
    pass


class EmptyFamily(FFSalemError):
    pass


class EmptySet(FFSalemError):
    pass


class EmptySupport(FFSalemError):
    pass


class TooLarge(FFSalemError):
    pass


class NotKakeya(FFSalemError):
    pass


class GridTooLarge(FFSalemError):
    pass


class FormatError(FFSalemError):
    """Malformed input file."""
