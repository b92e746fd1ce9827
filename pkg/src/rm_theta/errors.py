"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`RmThetaError`;
the CLI maps those to exit status 3 and reports the class name.
"""


class RmThetaError(Exception):
    pass


# local fields
class NonPrime(RmThetaError, ValueError):
    pass


class InvalidExtension(RmThetaError, ValueError):
    pass


class FieldMismatch(RmThetaError, ValueError):
    pass


class DivisionByZero(RmThetaError, ZeroDivisionError):
    pass


class PrecisionError(RmThetaError, ValueError):
    """Requested digits lie beyond the known precision of an element."""


class UnsupportedField(RmThetaError, ValueError):
    pass


# characters
class ZeroArgument(RmThetaError, ValueError):
    pass


class InconsistentCharacterData(RmThetaError, ValueError):
    pass


class UnramifiedCharacter(RmThetaError, ValueError):
    pass


# lattices
class DimensionMismatch(RmThetaError, ValueError):
    pass


class SingularMatrix(RmThetaError, ValueError):
    pass


# local zeta
class ZeroDiagonal(RmThetaError, ValueError):
    pass


class NotBorel(RmThetaError, ValueError):
    pass


class DivergentParameters(RmThetaError, ValueError):
    pass


class SatakeUnsolvable(RmThetaError, ValueError):
    pass


# curves
class BadReduction(RmThetaError, ValueError):
    pass


class UnsupportedFieldSize(RmThetaError, ValueError):
    pass


class WeilBoundViolation(RmThetaError, ArithmeticError):
    pass


# theta series
class IndefiniteGram(RmThetaError, ValueError):
    pass


class BoundTooLarge(RmThetaError, RuntimeError):
    pass


# concordance
class MissingPrime(RmThetaError, KeyError):
    pass


class RamifiedPrimeUnsupported(RmThetaError, ValueError):
    pass


class NonIntegralProduct(RmThetaError, ArithmeticError):
    pass


class DiscMismatch(RmThetaError, ValueError):
    pass
