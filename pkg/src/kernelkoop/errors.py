"""Exception types shared across the package."""


class KernelKoopError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(KernelKoopError, ValueError):
    """An argument violates a precondition (dimension mismatch, bad value)."""


class DegenerateInputError(KernelKoopError, ValueError):
    """Input data is structurally unusable (duplicates, empty sets, too few centers)."""


class NotPositiveDefiniteError(KernelKoopError, ArithmeticError):
    """A matrix expected to be positive definite failed factorization."""


class ConfigError(KernelKoopError, ValueError):
    """A configuration file or option is invalid."""


class CsvFormatError(KernelKoopError, ValueError):
    """An input CSV file does not match the expected schema."""
