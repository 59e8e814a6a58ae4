"""overrank: exact q-series calculus for overpartition rank deviations.

The kernel computes truncated Laurent series over cyclotomic fields with no
floating point anywhere, and verifies families of generating-function
identities (Appell-Lerch sums, theta quotients, rank deviation pairs)
against an independent combinatorial enumeration oracle.
"""

from .cyclotomic import CycloNum, Rational, root_of_unity_sum, zeta
from .errors import (
    ExponentOverflow,
    ExprSyntaxError,
    GenericSearchExhausted,
    LevelOverflow,
    NotInvertible,
    ParityError,
    PoleError,
    QAlgebraError,
    RangeError,
)

__all__ = [
    "CycloNum",
    "Rational",
    "zeta",
    "root_of_unity_sum",
    "QAlgebraError",
    "LevelOverflow",
    "ExponentOverflow",
    "NotInvertible",
    "PoleError",
    "GenericSearchExhausted",
    "ParityError",
    "RangeError",
    "ExprSyntaxError",
]

__version__ = "0.1.0"
