"""Exception types shared across the package."""


class CascataError(Exception):
    """Base class for all errors raised by cascata."""


class DataError(CascataError, ValueError):
    """Input data is malformed, empty or violates an invariant."""


class DegenerateDataError(DataError):
    """A statistic is undefined for the given data (no variance, too few points)."""


class CollinearityError(DataError):
    """Regressor matrix is rank deficient."""

    def __init__(self, message, columns=()):
        super().__init__(message)
        self.columns = tuple(columns)
