"""Shared exception types."""


class DomainError(ValueError):
    """Inputs outside the validity domain of a formula or operation."""


class EscapeError(RuntimeError):
    """Orbit left the escape radius where boundedness was required."""


class ConvergenceError(RuntimeError):
    """An iterative computation failed to reach its tolerance."""


class ConfigError(ValueError):
    """Malformed or unknown run-configuration input."""
