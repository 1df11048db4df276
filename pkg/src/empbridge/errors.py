"""Exception taxonomy shared across the package.

Configuration and validation problems raise ValueError subclasses so they can
be caught uniformly at the CLI boundary; capacity and numeric failures raise
RuntimeError subclasses and map to a distinct exit code.
"""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ShapeError(ValueError):
    """Array or vector lengths do not line up."""


class ConfigError(ValueError):
    """The experiment configuration is malformed or unresolvable."""


class ScheduleInvalidError(DomainError):
    """A blocking-schedule constraint is violated."""


class DegenerateFitError(ValueError):
    """A regression has no information to fit (constant or collapsed data)."""


class UnsupportedOperationError(ValueError):
    """The operation is not defined for this class kind."""


class NotACovarianceError(ValueError):
    """A matrix fails the symmetric positive semi-definite requirement."""


class InconsistentCovarianceError(ValueError):
    """A conditional (Schur complement) law is not a covariance."""


class DivergentIntegralError(DomainError):
    """An entropy integral diverges for the requested parameters."""


class CapacityError(RuntimeError):
    """A configured resource budget would be exceeded; names the budget."""


class NumericError(RuntimeError):
    """Quadrature or linear algebra failed to reach its tolerance."""
