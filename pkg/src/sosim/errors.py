"""Common error hierarchy. Module-specific errors subclass SosimError."""


class SosimError(Exception):
    """Base class for all errors raised by this package."""
