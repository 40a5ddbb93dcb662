"""Exception types raised by the detection pipeline."""


class DsegError(ValueError):
    """Base class for all dseg errors."""


class InvalidInputError(DsegError):
    """Input image or argument violates a precondition."""


class OutOfBoundsError(DsegError):
    """Sample point outside the valid interior of the image."""


class InvalidConfigurationError(DsegError):
    """Parameter set is inconsistent (e.g. pyramid level too small)."""


class UpdateDegenerateError(DsegError):
    """Innovation covariance is numerically singular."""


class DegenerateSegmentError(DsegError):
    """Segment has zero extent."""
