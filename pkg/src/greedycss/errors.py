"""Exception types raised across the package."""


class MatrixFormatError(ValueError):
    """Input file could not be parsed; ``line`` is 1-based when known."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class DegenerateColumnError(ValueError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"column {index} has zero norm and cannot be normalized")


class DeadCandidateError(ValueError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"candidate {index} lies in the span of the current selection")


class GuardError(RuntimeError):
    """A problem-size guard was exceeded (brute force, dense SVD, ...)."""


class ConvergenceError(RuntimeError):
    pass
