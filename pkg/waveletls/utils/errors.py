"""
Exception hierarchy for waveletls.

Every error raised by the library derives from WaveletLSError and carries the
exit code the CLI uses when the error reaches the top level.
"""


class WaveletLSError(Exception):
    """Base class for all waveletls errors."""

    exit_code = 1


class ConfigError(WaveletLSError):
    """Invalid configuration, flag values or missing input files."""

    exit_code = 2


class RegistryError(ConfigError, KeyError):
    """Unknown wavelet filter name."""

    def __str__(self) -> str:
        # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class DataError(WaveletLSError):
    """Unreadable or inconsistent data."""

    exit_code = 3


class DomainError(DataError, ValueError):
    """An argument lies outside its mathematical domain."""


class DimensionError(DataError, ValueError):
    """Array sizes are incompatible (including p * 2**J > n)."""


class TranslateIndexError(DomainError, IndexError):
    """Translate k outside 0..2**J - 1."""


class PredictorIndexError(DomainError, IndexError):
    """Predictor index outside 1..p."""


class ModelVersionError(DataError):
    """A model file was written with a different schema version."""


class NumericError(WaveletLSError, ArithmeticError):
    """Non-finite values or a failed factorization."""

    exit_code = 4
