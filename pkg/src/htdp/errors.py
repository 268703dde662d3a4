"""Exception types shared across the package.

The CLI maps these onto process exit codes (config 2, data 3, resource 4).
"""


class ConfigError(ValueError):
    """Invalid parameters or configuration."""


class DomainError(ValueError):
    """Input outside the domain of an operation."""


class DataError(RuntimeError):
    """Unreadable or malformed input data."""


class ResourceError(RuntimeError):
    """A bounded retry loop ran out of attempts."""
