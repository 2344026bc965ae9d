"""Exception types shared across the toolkit.

Two roots: constraint violations on inputs (:class:`ValidationError`) and
numeric procedures that cannot produce a trustworthy answer
(:class:`NumericalError`).  The CLI maps the former to exit code 1 and the
latter to exit code 2.
"""


class ValidationError(ValueError):
    """An input violates a documented constraint."""


class NumericalError(RuntimeError):
    """A numeric procedure failed (no root bracket, degenerate objective...)."""


class InvalidParameterError(ValidationError):
    """Distribution parameters violate their constraints."""


class OutOfSupportError(ValidationError):
    """A value lies outside the distribution support."""


class InvalidRankError(ValidationError):
    """Order-statistic rank outside 1..m."""


class PrizeSumError(ValidationError):
    """Static prize vector does not sum to one."""


class NonMonotoneAllocationError(ValidationError):
    """Interim allocation decreases; no monotone equilibrium exists."""


class AsymmetricSpecError(ValidationError):
    """A symmetric evaluator was handed an asymmetric contest."""


class NoSignChangeError(NumericalError):
    """Root bracketing failed: the function does not change sign on the grid."""


class DegenerateContestError(NumericalError):
    """The contest rewards nobody; requested quantity is undefined."""


class IrregularDistributionError(NumericalError):
    """Revenue benchmark needs a regular distribution; supply one externally."""
