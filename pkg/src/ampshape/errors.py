"""Exception hierarchy shared by all shaping modules."""


class ShapingError(Exception):
    """Base class for every error raised by ampshape."""


class LUTMiss(ShapingError, KeyError):
    """Key is outside the coverage of a coefficient lookup table."""


class CompositionMismatchError(ShapingError, ValueError):
    """A sequence does not have the composition it is claimed to have."""


class DegenerateShaperError(ShapingError):
    """The requested shaper would carry zero input bits."""


class RateInfeasibleError(ShapingError):
    """Not enough sequences are available to address the requested bits."""


class DecodeIntegrityError(ShapingError):
    """A received sequence cannot have been produced by the shaper.

    Under the usual PAS assumption every channel error is corrected by the
    FEC, so this signals an upstream decoding failure.
    """


class CodebookError(ShapingError):
    """A codebook is malformed or internally inconsistent."""
