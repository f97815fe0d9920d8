"""Exception hierarchy shared by all slspec modules."""


class SlspecError(Exception):
    """Base class for all slspec errors."""


class InvalidInputError(SlspecError):
    """An argument violates a documented precondition."""


class UnsupportedQueryError(SlspecError):
    """The requested quantity cannot be computed from the available data."""


class DegenerateMatrixError(InvalidInputError):
    """Boundary matrix rows are linearly dependent (all six minors vanish)."""


class IntegrationFailureError(SlspecError):
    """Adaptive ODE integration broke down before reaching the endpoint.

    Attributes:
        x_reached: abscissa where the step size underflowed.
    """

    def __init__(self, message, x_reached=None):
        super().__init__(message)
        self.x_reached = x_reached


class BoundaryZeroError(SlspecError):
    """A contour passes too close to a zero; the box must be perturbed."""


class NumericalFailureError(SlspecError):
    """A winding/refinement computation did not converge to an integer answer."""


class NotAnEigenvalueError(SlspecError):
    """The boundary-form matrix is nonsingular at the requested point."""


class AssignmentFailureError(SlspecError):
    """Eigenvalue-to-index assignment found more candidates than a pair."""


class InsufficientTruncationError(InvalidInputError):
    """Canonical-product truncation is too short for the requested argument."""


class InternalConsistencyError(SlspecError):
    """Two independent computations of the same quantity disagree."""
