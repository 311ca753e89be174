class Error(Exception):
    """Base class for failures raised by ladderstab.

    Every failure carries a human-readable message plus a ``diagnostics``
    dict describing what the failing routine knew at the time (residuals,
    offending eigenvalues, the clause that failed).
    """

    exit_code = 2

    def __init__(self, message, diagnostics=None):
        super(Error, self).__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ValidationError(Error):
    """Raised when a filter or system violates its standing hypotheses."""

    exit_code = 1


class NumericalError(Error):
    """Raised when a dense kernel fails or a certified identity does not hold."""

    exit_code = 2


class ConfigError(Error):
    """Raised for malformed configuration documents and command-line misuse."""

    exit_code = 3


class AdvisoryWarning(UserWarning):
    pass


__all__ = [
    'AdvisoryWarning',
    'ConfigError',
    'Error',
    'NumericalError',
    'ValidationError',
]
