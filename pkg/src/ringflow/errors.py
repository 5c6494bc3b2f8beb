"""Exception hierarchy shared by all ringflow modules."""


class RingflowError(Exception):
    """Base class for every error raised by this package."""


class ZeroVectorError(RingflowError, ValueError):
    pass


class InvalidValueError(RingflowError, ValueError):
    pass


class InvalidStateError(RingflowError, ValueError):
    pass


class ParseError(RingflowError, ValueError):
    """Malformed coefficient or series file.

    ``line`` is the 1-based line number of the offending input, or None when
    the problem concerns the file as a whole.
    """

    def __init__(self, message: str, line: int | None = None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}".strip() if where else message)


class DegenerateOperatorError(RingflowError, ValueError):
    pass


class InvalidGridError(RingflowError, ValueError):
    pass


class DimensionMismatchError(RingflowError, ValueError):
    pass


class KernelTooLargeError(RingflowError, MemoryError):
    pass


class ConvergenceFailure(RingflowError, RuntimeError):
    """Eigensolver hit its iteration cap.

    The best iterate seen so far is kept so that callers can decide whether
    it is good enough.
    """

    def __init__(self, message: str, eigenvalue: float, vector, residual: float,
                 iterations: int):
        super().__init__(message)
        self.eigenvalue = eigenvalue
        self.vector = vector
        self.residual = residual
        self.iterations = iterations


class StrideTooLargeError(RingflowError, ValueError):
    pass


class DegenerateSeriesError(RingflowError, ValueError):
    pass


class InsufficientRangeError(RingflowError, ValueError):
    pass
