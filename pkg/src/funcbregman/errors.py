"""Exception hierarchy shared by every module in the package."""


class BregmanError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(BregmanError, ValueError):
    pass


class InvalidDomainError(InvalidArgumentError):
    """Interval endpoints out of order or otherwise empty domain."""


class IncompatibleSpaceError(BregmanError, ValueError):
    """Two grid functions live on different measure spaces."""


class DomainViolationError(BregmanError, ValueError):
    """A functional was evaluated outside the set where it is defined."""


class DegenerateInputError(InvalidArgumentError):
    pass


class NumericFailureError(BregmanError, RuntimeError):
    """An iterative or quadrature routine failed to converge.

    ``diagnostics`` carries whatever the failing routine reported.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
