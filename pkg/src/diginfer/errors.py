"""Exception hierarchy shared across the package."""


class DigInferError(Exception):
    """Base class for all package-specific errors."""


class DomainError(DigInferError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SizeGuardError(DigInferError):
    """A request would exceed the exact-enumeration size guard."""


class ConfigurationError(DigInferError):
    """A run configuration is inconsistent with the requested computation."""


class ModelConstructionError(DigInferError):
    """Random model construction failed (retry cap exhausted)."""
