"""Exception hierarchy.

Every domain error derives from :class:`AdelicError`; the CLI maps these to
exit code 2 and prints the class name on stderr.
"""


class AdelicError(Exception):
    """Base class for domain errors."""

    @property
    def name(self):
        return type(self).__name__


class PlaceMismatch(AdelicError):
    pass


class PlaceFieldMismatch(AdelicError):
    pass


class FieldMismatch(AdelicError):
    pass


class DivisionByZeroToPrecision(AdelicError):
    pass


class PrecisionExhausted(AdelicError):
    pass


class InsufficientPrecision(AdelicError):
    pass


class NotASimpleRoot(AdelicError):
    pass


class NoRootInResidueField(AdelicError):
    pass


class ZeroResidue(AdelicError):
    pass


class NotPrime(AdelicError):
    pass


class ZeroElement(AdelicError):
    pass


class NonIntegralIdeal(AdelicError):
    pass


class UnsupportedField(AdelicError):
    pass


class UnsupportedPlace(AdelicError):
    pass


class NonPrincipalFinitePart(AdelicError):
    def __init__(self, message, class_label=None):
        super().__init__(message)
        self.class_label = class_label


class SingularToPrecision(AdelicError):
    pass


class ShapeMismatch(AdelicError):
    pass


class NotInvertible(AdelicError):
    pass


class SearchSpaceTooLarge(AdelicError):
    pass


class BudgetExceeded(AdelicError):
    pass


class LiteralError(ValueError):
    """Malformed literal on the command line or in a JSON document.

    Not a domain error: the CLI treats it as a usage error.
    """
