"""Exception hierarchy shared across the package.

The CLI maps these to exit codes: ConfigError -> 2, ProviderError -> 3.
Everything else is a plain failure.
"""


class RagcovError(Exception):
    """Base class for all package errors."""


class ConfigError(RagcovError):
    """Invalid or incomplete configuration (bad ranges, missing credentials)."""


class ProviderError(RagcovError):
    """A remote backend failed after exhausting retries."""


class DataError(RagcovError):
    """Degenerate or inconsistent data (empty corpus, zero-norm vectors,
    dimension mismatches)."""
