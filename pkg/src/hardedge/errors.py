"""Exception hierarchy shared by all modules.

``DomainError`` marks inputs outside an operation's preconditions (the CLI maps
it to exit code 2); ``NumericalError`` marks a computation that could not meet
its accuracy target (exit code 3).
"""


class HardEdgeError(Exception):
    pass


class DomainError(HardEdgeError, ValueError):
    pass


class PoleError(DomainError):
    pass


class BranchCutError(DomainError):
    pass


class ContourError(DomainError):
    """Point lies on (or numerically too close to) a jump contour."""


class NumericalError(HardEdgeError, ArithmeticError):
    pass


class BesselOverflowError(NumericalError, OverflowError):
    pass


class ConvergenceError(NumericalError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
