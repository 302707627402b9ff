"""Exception types raised by the library."""


class ManifoldLandauError(Exception):
    """Base class for all library errors."""


class InvalidInputError(ManifoldLandauError):
    """Non-finite or structurally malformed input."""


class OffManifoldError(InvalidInputError):
    """Point is too far from the unit sphere to be repaired."""


class TangencyError(InvalidInputError):
    """Vector is not tangent to the sphere at its base point."""


class InvalidCurveError(ManifoldLandauError):
    """Curve data violates a family invariant or a tangency precondition."""


class OutOfDomainError(ManifoldLandauError):
    """Evaluation time lies outside a sampled curve's grid."""


class IngestionError(ManifoldLandauError):
    """Sampled-curve ingestion failure; carries the first offending row."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class NumericFailureError(ManifoldLandauError):
    """A scan hit a non-finite value; carries the time where it happened."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class SingularityError(ManifoldLandauError):
    """Intrinsic auxiliary function evaluated at (or too near) the antipode."""


class HypothesisViolationError(ManifoldLandauError):
    """The bound's hypotheses fail on this curve, so no claim is made."""


class SpecValidationError(ManifoldLandauError):
    """CLI spec document is malformed; carries the first offending key."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
