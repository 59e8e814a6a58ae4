"""Exceptions shared across the kernel modules."""


class QAlgebraError(Exception):
    """Base class for all overrank errors."""


class LevelOverflow(QAlgebraError):
    """A cyclotomic operation needed a field level above the configured cap."""


class ExponentOverflow(QAlgebraError):
    """A q-exponent left the checked machine range."""


class NotInvertible(QAlgebraError):
    """Series inversion attempted on a series with no invertible leading term."""


class PoleError(QAlgebraError):
    """A theta factor or Appell-Lerch denominator vanishes for these parameters."""


class GenericSearchExhausted(QAlgebraError):
    """No admissible generic parameter found within the candidate bound."""


class ParityError(QAlgebraError):
    """The (a, M) parity does not land in a printed case of the pair formulas."""


class RangeError(QAlgebraError):
    """A formula parameter is outside its admissible range."""


class ExprSyntaxError(QAlgebraError):
    """Expression parse failure, with byte-precise position information."""

    def __init__(self, message, line, column, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        detail = f"{message} at line {line}, column {column}"
        if self.expected:
            detail += " (expected " + ", ".join(self.expected) + ")"
        super().__init__(detail)
