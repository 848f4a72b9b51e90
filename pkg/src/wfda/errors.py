"""Exception hierarchy.

Errors split into two families so callers (notably the CLI) can map them to
exit codes: configuration/validation problems and numerical/degeneracy
problems.
"""


class WfdaError(Exception):
    """Base class for all errors raised by the package."""


class InvalidInputError(WfdaError, ValueError):
    """Malformed data or arguments."""


class InvalidParameterError(InvalidInputError):
    """A tunable is outside its admissible range."""


class IngestionError(InvalidInputError):
    """A file could not be read or parsed."""


class UnsupportedOperationError(InvalidInputError):
    """The operation is not defined for this kind of model."""


class NumericalError(WfdaError, ArithmeticError):
    """A factorization or evaluation failed numerically."""


class DegenerateGeometryError(NumericalError):
    """Coincident class means or zero-norm means make a weight undefined."""


class DegenerateWeightsError(NumericalError):
    """A weight matrix (or one of its rows) is entirely zero."""
