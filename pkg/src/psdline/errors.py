"""Exception hierarchy shared by all psdline modules."""


class PsdlineError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(PsdlineError):
    """Matrix dimensions or index subsets are incompatible."""


class DomainError(PsdlineError):
    """An argument lies outside the domain of the operation."""


class ContractError(PsdlineError):
    """A structural precondition (symmetry, factorization, monicity) is violated."""


class FullRankMatrixError(DomainError):
    """The base matrix has full rank, so the line meets the cone transversally.

    Callers may treat this as an early exit: the convergence rate is
    trivially linear and no corank analysis applies.
    """


class DivergenceError(PsdlineError):
    """The alternating-projection parameter grew unboundedly.

    Usually means the line meets the cone in more than one point, so the
    singleton-intersection premise of the rate analysis fails.
    """


class TrackingError(PsdlineError):
    """Eigenvalue branches could not be followed unambiguously."""


class NumericalError(PsdlineError):
    """A floating-point routine failed to reach its accuracy target."""


class InvariantViolation(PsdlineError):
    """A theorem-backed invariant failed; indicates a bug or bad input."""
