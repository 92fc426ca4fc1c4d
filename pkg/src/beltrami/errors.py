"""Exception types shared across the package."""


class BeltramiError(Exception):
    """Base class for all package errors."""


class DomainError(BeltramiError, ValueError):
    """An argument lies outside the mathematically admissible range."""


class PointOutsideGridError(DomainError):
    pass


class BallOutsideGridError(DomainError):
    pass


class CoincidentPointsError(DomainError):
    pass


class CgridFormatError(BeltramiError):
    """Malformed cgrid file."""


class NotClosedError(BeltramiError):
    """A 1-form failed the discrete closedness test, so no potential exists."""

    def __init__(self, residual, tol):
        super().__init__(f"curl residual {residual:.3e} exceeds tolerance {tol:.3e}")
        self.residual = residual
        self.tol = tol


class DirectQuadratureTooLargeError(BeltramiError):
    """direct_quadrature is O(n^4) and restricted to n <= 64."""


class ZeroInputError(BeltramiError):
    pass


class NoConvergenceError(BeltramiError):
    def __init__(self, iterations, residual=None):
        msg = f"no convergence after {iterations} iterations"
        if residual is not None:
            msg += f" (residual {residual:.3e})"
        super().__init__(msg)
        self.iterations = iterations
        self.residual = residual


class InvalidEtaError(BeltramiError):
    """Right-hand-side form is not compactly supported inside the box."""


class NonPositiveJacobianError(BeltramiError):
    """Signals numerical breakdown: the constructed Jacobian must be positive."""


class DegenerateNormalizationError(BeltramiError):
    """Phi(0) == Phi(1), so the two-point normalization is undefined."""


class DegenerateDerivativeError(BeltramiError):
    """|dPhi/dz| fell below the floor where a quotient was required."""


class PreconditionResidualTooLargeError(BeltramiError):
    """The supplied (g, F) pair does not satisfy its defining relation."""
