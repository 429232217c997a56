"""Exception types shared across the package.

The CLI maps each family onto a distinct exit code.
"""


class ConfigError(ValueError):
    """Invalid experiment configuration or model spec."""


class DataError(ValueError):
    """Missing files, missing columns, degenerate series."""


class NumericError(FloatingPointError):
    """A loss or gradient became non-finite."""


class StaleCacheError(RuntimeError):
    """A forward cache was reused or handed to the wrong backward."""
