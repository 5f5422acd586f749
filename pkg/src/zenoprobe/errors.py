"""Exception types shared across the package."""


class ZenoError(Exception):
    """Base class for package errors."""


class DomainError(ZenoError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class ResourceError(ZenoError, RuntimeError):
    """A computation would exceed a configured size cap."""
