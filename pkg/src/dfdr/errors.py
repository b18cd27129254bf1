"""Exception types shared across the package."""


class DfdrError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(DfdrError):
    """An input file is malformed (ragged row, non-numeric cell, missing value)."""


class ValidationError(DfdrError):
    """Input values violate a documented contract (range, uniqueness, labels)."""


class PreprocessingError(DfdrError):
    """The normalization step is undefined for the given data."""


class UndefinedEstimateError(DfdrError):
    """An estimator has an empty denominator and no defined value."""


class UsageError(DfdrError):
    """Invalid command-line invocation."""
