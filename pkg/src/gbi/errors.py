"""Exception types shared across the package."""


class LabelError(ValueError):
    """Unknown, duplicate, or overlapping variable labels."""


class DomainError(ValueError):
    """A parameter or matrix is outside its documented domain."""


class NumericalError(ArithmeticError):
    """Failed factorization, singular block, unpaired spectrum, or missing root bracket."""


class ClampWarning(RuntimeWarning):
    """A slightly negative information value was clamped to zero (float noise)."""
