"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class QuadratureFailure(RuntimeError):
    """Requested tolerance could not be reached at the configured order cap."""


class NonIntegrable(ValueError):
    """The integrand is not integrable under the declared decay or exponents."""


class DivergentConstant(ValueError):
    """A beta-type constant required by an inequality is infinite.

    Raised when a check is requested whose precondition (finiteness of the
    constant) fails.  Sweeps catch it and mark the cell as skipped.
    """


class AliasingWarning(UserWarning):
    """Grid data is not negligible at the periodic box boundary."""
