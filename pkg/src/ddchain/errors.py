"""Exception hierarchy shared across the package."""


class DdchainError(Exception):
    """Base class for all errors raised by ddchain."""


class NumericalError(DdchainError):
    """A numerical routine failed: eigensolver non-convergence or an
    unstable time stepper."""
