"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: InputError -> 2, EmptyResultError -> 3,
anything else -> 1.
"""


class NewsimpactError(Exception):
    """Base class for all errors raised by this package."""


class InputError(NewsimpactError):
    """Bad or missing input data (files, malformed rows, invalid arguments)."""


class EmptyResultError(NewsimpactError):
    """A stage produced nothing to work with (e.g. empty vocabulary)."""


class ConvergenceError(NewsimpactError):
    """An iterative numerical routine failed to converge within its cap."""
