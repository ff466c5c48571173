"""Exception hierarchy for the twinbeams package."""


class TwinBeamError(Exception):
    """Base class for all package errors."""


class InputFormatError(TwinBeamError):
    """Malformed input file or record (carries the offending location)."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class EmptyDataError(TwinBeamError):
    """A reduction was requested on an empty shot record."""


class LevelMismatchError(TwinBeamError):
    """A moment set was passed to an operation expecting a different level."""


class InvalidEtaError(TwinBeamError):
    """Detection efficiency outside (0, 1]."""


class NegativeMeanError(TwinBeamError):
    """Noise subtraction drove a mean below zero."""


class NegativeVarianceError(TwinBeamError):
    """A variance that must be nonnegative came out negative beyond tolerance."""


class NegativeCrossCovarianceError(TwinBeamError):
    """Anticorrelated beams cannot be represented by the pair-correlation model."""


class ZeroVarianceError(TwinBeamError):
    """Model inversion requires strictly positive intensity variances."""


class OutOfRangeError(TwinBeamError):
    """A derived quantity fell outside its admissible interval."""


class PhysicalityError(TwinBeamError):
    """Model parameters violate the positivity of the fictitious noise means."""


class CancellationOverflowError(TwinBeamError):
    """An alternating series lost more significant digits than allowed."""

    def __init__(self, message, digits_lost=None, where=None):
        super().__init__(message)
        self.digits_lost = digits_lost
        self.where = where


class EmptyRowError(TwinBeamError):
    """Conditioning on a photon number whose row mass underflows."""


class WrongRegimeError(TwinBeamError):
    """Quasi-distribution evaluator called on the wrong side of the threshold ordering."""


class WrongOrderingError(TwinBeamError):
    """Operation requires a specific ordering parameter (photodetection needs s = 1)."""


class BesselOverflowError(TwinBeamError):
    """Scaled Bessel evaluation failed (should not occur on finite grids)."""


class UnsupportedModelError(TwinBeamError):
    """The Monte Carlo sampler only covers pair-correlated (K <= 0) physical models."""


class InsufficientMassError(TwinBeamError):
    """Grid truncation left too little probability mass for the requested reduction."""
