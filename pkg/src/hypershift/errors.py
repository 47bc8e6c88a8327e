"""Exception types shared across the package."""


class DimensionMismatch(ValueError):
    """Multi-indices or points of different lengths were combined."""


class WeightDomainError(ValueError):
    """A weight value was requested outside the weight's domain of definition."""


class SequenceExhausted(WeightDomainError):
    """An explicit radial coefficient list is shorter than the requested index."""


class BallDomainError(ValueError):
    """A metric evaluation point lies on or outside the unit sphere."""


class TailUnreliableError(RuntimeError):
    """No rigorous tail bound is available for a truncated series evaluation."""


class NonHermitianError(ValueError):
    """A matrix expected to be Hermitian deviates beyond tolerance."""


class WeightSpecError(ValueError):
    """A serialized weight specification is malformed."""
