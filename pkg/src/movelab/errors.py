"""Exception hierarchy shared by every module."""


class MovelabError(Exception):
    """Base class; the CLI maps these to exit code 3 unless noted."""


class NegativeMass(MovelabError, ValueError):
    pass


class NotNormalized(MovelabError, ValueError):
    pass


class DuplicateConfiguration(MovelabError, ValueError):
    pass


class ParameterOutOfRange(MovelabError, ValueError):
    pass


class GroundMismatch(MovelabError, ValueError):
    pass


class ModeMismatch(MovelabError, TypeError):
    pass


class BadWeights(MovelabError, ValueError):
    pass


class ZeroProbabilityEvent(MovelabError, ValueError):
    pass


class SizeExceeded(MovelabError, ValueError):
    pass


class NotDominated(MovelabError, ValueError):
    pass


class LengthMismatch(MovelabError, ValueError):
    pass


class ToleranceTooLow(MovelabError, ValueError):
    pass


class NonInvertibleChannel(MovelabError, ValueError):
    pass


class NumericallyInvalid(MovelabError, ArithmeticError):
    pass


class FormatError(MovelabError, ValueError):
    """Malformed measure/kernel input. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
