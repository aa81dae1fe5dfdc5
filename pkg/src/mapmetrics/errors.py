"""Exception types shared across the toolkit."""


class MapMetricsError(Exception):
    """Base class for all toolkit errors."""


class EmptyMaskError(MapMetricsError):
    """A mask operation needed at least one foreground pixel."""


class DimensionMismatchError(MapMetricsError):
    """Image and mask dimensions differ."""


class DegeneratePageError(MapMetricsError):
    """Page area is zero."""


class ConstantInputError(MapMetricsError):
    """Rank correlation is undefined because one input has zero rank variance."""


class InvalidThresholdError(MapMetricsError):
    """A support threshold fell outside (0, 1]."""


class ZeroDenominatorError(MapMetricsError):
    """Conditional rate denominator has zero support."""


class EmptyGroupError(MapMetricsError):
    """A cross-group comparison received an empty group."""


class InsufficientYearsError(MapMetricsError):
    """A trend test needs at least three distinct years."""


class ImageDecodeError(MapMetricsError):
    """An image or mask file could not be decoded."""
