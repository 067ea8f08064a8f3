"""Numerics for large-gap asymptotics of the thinned hard-edge tacnode process."""

from .errors import ConvergenceError, DomainError, HardEdgeError, NumericalError

__version__ = "0.1.0"
__all__ = ["ConvergenceError", "DomainError", "HardEdgeError", "NumericalError", "__version__"]
