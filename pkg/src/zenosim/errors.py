"""Exception types shared across the package.

ValueError is used for plain argument/precondition violations; the classes
here mark failures that callers may want to handle distinctly (CLI exit
codes, HTTP status mapping).
"""


class ZenosimError(Exception):
    """Base class for package-specific failures."""


class ConfigError(ZenosimError):
    """Invalid or malformed run configuration / input file."""


class NumericsError(ZenosimError):
    """A numerical routine failed to meet its accuracy contract."""


class FitError(ZenosimError):
    """Least-squares fit rejected the data or did not converge."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class LineNotFoundError(ZenosimError):
    """No spectral line found above the detection threshold."""
