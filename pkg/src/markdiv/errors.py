"""Exception hierarchy shared by all markdiv modules."""


class MarkdivError(Exception):
    """Base class for every error raised by markdiv."""


class NonFiniteError(MarkdivError, ValueError):
    pass


class NonSquareError(MarkdivError, ValueError):
    pass


class NotHermitianError(MarkdivError, ValueError):
    pass


class DimensionMismatchError(MarkdivError, ValueError):
    pass


class LengthNotSquareError(MarkdivError, ValueError):
    pass


class KOutOfRangeError(MarkdivError, ValueError):
    pass


class PreconditionError(MarkdivError, ValueError):
    pass


class NotHermiticityPreservingError(MarkdivError, ValueError):
    pass


class TraceNotPreservedError(MarkdivError, ValueError):
    pass


class NotAChannelError(MarkdivError, ValueError):
    pass


class DegenerateSpectrumError(MarkdivError, ArithmeticError):
    pass


class DimTooSmallError(MarkdivError, ValueError):
    pass


class BisectionFailure(MarkdivError, RuntimeError):
    pass


class NoViolationFound(MarkdivError, RuntimeError):
    """Raised when a witness search exhausts its schedule.

    ``largest_epsilon`` holds the largest perturbation that was tried.
    """

    def __init__(self, message, largest_epsilon=None):
        super().__init__(message)
        self.largest_epsilon = largest_epsilon


class COutOfRangeError(MarkdivError, ValueError):
    pass


class NotInClassError(MarkdivError, ValueError):
    pass


class NotStochasticError(MarkdivError, ValueError):
    pass


class NotRateMatrixError(MarkdivError, ValueError):
    pass


class ParseError(MarkdivError, ValueError):
    pass


class UnknownExampleError(MarkdivError, KeyError):
    pass
