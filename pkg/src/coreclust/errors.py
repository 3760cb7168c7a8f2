"""Exception types shared across the toolkit."""


class CoreclustError(ValueError):
    """Base class for all toolkit errors."""


class ValidationError(CoreclustError):
    """An instance, clustering, or space violates a structural invariant."""


class ParameterError(CoreclustError):
    """An algorithm was called with parameters outside its valid range."""


class SizeLimitError(CoreclustError):
    """An exhaustive operation was asked to run beyond its declared size limits."""
