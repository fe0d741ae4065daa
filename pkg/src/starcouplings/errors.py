"""Exception types shared across the package."""


class InvalidCouplingError(ValueError):
    """A vertex coupling or boundary-condition pair violates its admissibility
    conditions (wrong dimensions, non-unitary matrix, rank-deficient pair,
    non-Hermitian A B*, unsupported family tag)."""


class PoleError(ArithmeticError):
    """A kernel or matrix is evaluated at (or too close to) a pole: the
    requested energy lies on the spectrum of the operator, or a guarded
    denominator fell below its tolerance."""
