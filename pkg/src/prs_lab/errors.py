"""Error taxonomy shared by every module."""


class ShapeError(ValueError):
    """Operands have incompatible dimensions."""


class DomainError(ValueError):
    """An argument is outside the operation's domain."""


class ResourceError(RuntimeError):
    """A dense object would exceed the configured memory cap."""


class NumericError(ArithmeticError):
    """A numerical sanity check (normalization, PSD, ...) failed."""


class InfeasibleError(RuntimeError):
    """An exhaustive-search parameter exceeds its configured cap."""


class UsageError(ValueError):
    """Invalid configuration passed to the experiment runner."""
