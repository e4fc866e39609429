"""Exception types shared across mixlab modules."""


class MixlabError(Exception):
    """Base class for all mixlab errors."""


class InputError(MixlabError, ValueError):
    """An argument is out of range, malformed or inconsistent."""


class CapacityError(MixlabError):
    """The requested computation exceeds the size guard of its engine."""


class ConvergenceError(MixlabError):
    """An iterative method failed to converge within its budget."""

    def __init__(self, message, last_value=None, residual=None):
        super().__init__(message)
        self.last_value = last_value
        self.residual = residual


class ParseError(MixlabError, ValueError):
    """A file could not be parsed; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
