"""Exception types shared across the package.

Two failure classes are distinguished so the command-line tool can map them to
distinct exit codes: bad input (configuration, mesh, or parameter validation)
versus breakdown during the numerics themselves.
"""


class QstripError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(QstripError):
    """Invalid configuration, mesh, or parameter combination (CLI exit code 2)."""


class NumericalError(QstripError):
    """Numerical breakdown: singular pivot, non-finite field, out-of-domain
    kernel parameters (CLI exit code 3)."""
