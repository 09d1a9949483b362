"""Exception hierarchy.

``ParameterError`` covers bad inputs (exit code 1 in the CLI), ``NumericalError``
covers failures of the numerics themselves (exit code 2).
"""


class ShiftMeanError(Exception):
    pass


class ParameterError(ShiftMeanError, ValueError):
    pass


class NumericalError(ShiftMeanError, ArithmeticError):
    pass


class DomainError(NumericalError):
    """A quantity is undefined for the given inputs (e.g. Fisher information of a Dirac)."""


class ConjugateSymmetryError(NumericalError):
    """A spectrum that should describe a real signal does not."""
