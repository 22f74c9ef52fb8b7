"""Exception hierarchy shared by all modules."""


class BHClockError(Exception):
    """Base class for package errors."""


class ParameterError(BHClockError, ValueError):
    """A parameter lies outside its admissible range."""


class DomainError(BHClockError, ValueError):
    """A point lies outside the domain of a map (disk, half-plane, exterior)."""


class TruncationError(BHClockError):
    """Fock-space cutoff is too small for the requested accuracy.

    The minimal admissible cutoff is available as ``required_cutoff``.
    """

    def __init__(self, message, required_cutoff=None):
        super().__init__(message)
        self.required_cutoff = required_cutoff


class UnsupportedMeasureError(BHClockError, ValueError):
    """The invariant disk measure is not normalisable for this Bargmann index."""


class NumericalError(BHClockError, ArithmeticError):
    """An iterative routine failed to converge or produced non-finite values."""
