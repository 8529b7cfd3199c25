"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid parameters: bad law, negative variance, malformed config."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class NumericalFailure(RuntimeError):
    """A numerical procedure did not converge to the requested accuracy."""
