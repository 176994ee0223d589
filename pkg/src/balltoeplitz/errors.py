"""Exception types shared across the package."""


class BallToeplitzError(Exception):
    """Base class for all library errors."""


class GeometryError(BallToeplitzError):
    pass


class SingularDenominatorError(GeometryError):
    """Moebius denominator vanished; signals an invariant violation."""


class CayleyPoleError(GeometryError):
    """Cayley transform evaluated at (or too close to) z_n = -1."""


class BranchCutError(GeometryError):
    """A fractional power left the validated right half-plane."""


class QuadratureConfigError(BallToeplitzError):
    """Requested quadrature level outside the supported range."""


class TailTruncationError(BallToeplitzError):
    """Sampled function does not decay on the grid boundary.

    Carries the offending boundary magnitude in ``boundary_magnitude``.
    """

    def __init__(self, message, boundary_magnitude):
        super().__init__(f"{message} (boundary magnitude {boundary_magnitude:.3e})")
        self.boundary_magnitude = boundary_magnitude


class PositivityViolationError(BallToeplitzError):
    """A quantity that must be nonnegative came out negative; implementation bug."""


class OutOfSupportError(BallToeplitzError):
    """Frequency outside the support of the convolution-kernel transform."""


class InvarianceViolationError(BallToeplitzError):
    """Symbol failed the group-invariance check required by the operation."""
