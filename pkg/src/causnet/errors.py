"""Exception types raised across the package."""


class CausnetError(Exception):
    """Base class for all package-specific errors."""


class ConstantChannel(CausnetError):
    """A channel has zero sample variance and cannot be standardized."""


class SeriesTooShort(CausnetError):
    """The time series is too short for the requested operation."""


class KTooSmall(CausnetError):
    """Too few variables for the requested coupling structure."""


class PersistentDivergence(CausnetError):
    """A map iteration diverged repeatedly across reseeding retries."""


class NumericBlowup(CausnetError):
    """A numerical integration produced non-finite values."""


class IllConditioned(CausnetError):
    """Normal equations are numerically singular; reduce the model order."""


class SingularAtFrequency(CausnetError):
    """A frequency-domain matrix inversion failed at some grid point."""


class SingularConditioningBlock(CausnetError):
    """The conditioning block of a residual covariance is not invertible."""


class TooFewSamples(CausnetError):
    """Not enough samples for a reliable nearest-neighbor estimate."""


class EmptyBand(CausnetError):
    """No frequency-grid point falls inside the requested band."""


class DimensionMismatch(CausnetError):
    """Two networks or matrices do not have matching dimensions."""
