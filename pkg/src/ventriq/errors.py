"""Exception types raised across the toolkit.

Everything derives from :class:`VentriqError` so callers can catch one base
class at the CLI boundary.
"""


class VentriqError(Exception):
    """Base class for all toolkit errors."""


# --- image loading -----------------------------------------------------------

class EmptyDirectoryError(VentriqError):
    """Frame or mask directory contains no loadable files."""


class MixedDimensionsError(VentriqError):
    """Files in one sequence do not share identical dimensions."""


class UnsupportedFormatError(VentriqError):
    """File is not an 8-bit single-channel PNG/PGM (or a valid .f32 sidecar)."""


# --- masks and geometry ------------------------------------------------------

class EmptyMaskError(VentriqError):
    """Mask has no foreground pixel."""


class DimensionMismatchError(VentriqError):
    """Two rasters that must share dimensions do not."""


# --- segmentation ------------------------------------------------------------

class MissingMaskError(VentriqError):
    """No stored mask for the requested frame position."""

    def __init__(self, frame_index: int, message: str = ""):
        self.frame_index = frame_index
        super().__init__(message or f"no mask for frame {frame_index}")


# --- ensembling / batch pairing ----------------------------------------------

class EmptyListError(VentriqError):
    """An operation requiring at least one element received none."""


class PairCountMismatchError(VentriqError):
    """Two directories meant to pair by numeric order have unequal counts."""


class EmptySetError(PairCountMismatchError):
    """Evaluation directories contain no pairs at all."""


# --- cardiac index arithmetic --------------------------------------------------

class NonPositiveDiastolicDiameterError(VentriqError):
    """Diastolic diameter must be > 0."""


class SystolicExceedsDiastolicError(VentriqError):
    """Systolic diameter is larger than the diastolic one."""


class NonPositiveAxisError(VentriqError):
    """Axis length must be > 0."""


class AxisOrderViolationError(VentriqError):
    """Long axis is shorter than the short axis."""


class NonPositiveAreaError(VentriqError):
    """Area must be > 0."""


class NegativeStrokeVolumeError(VentriqError):
    """ESV exceeds EDV; signals ED/ES mislabeling upstream."""


class ZeroEDVError(VentriqError):
    """End-diastolic volume must be > 0."""


class MissingHeartRateError(VentriqError):
    """Heart rate unavailable, so cardiac output cannot be computed."""


# --- beat detection ------------------------------------------------------------

class SeriesTooShortError(VentriqError):
    """Area series has fewer than 3 samples."""


class ConstantSeriesError(VentriqError):
    """Series has no usable extrema.

    Carries partial markers (`markers` attribute) so callers can still report
    the raw global extreme frames.
    """

    def __init__(self, message: str, markers=None):
        self.markers = markers
        super().__init__(message)


class NoCompleteBeatError(ConstantSeriesError):
    """Series is monotone: global extremes exist but no full cycle does."""


class InsufficientBeatsError(VentriqError):
    """Fewer than 2 same-phase markers; heart rate cannot be estimated."""


class TooManyEmptyFramesError(VentriqError):
    """More than 20% of frames produced an empty segmentation."""


class NoValidFramesError(VentriqError):
    """Every frame in the sequence produced an empty segmentation."""


# --- synthetic generator --------------------------------------------------------

class SpecInvalidError(VentriqError):
    """Synthetic-heart spec violates its invariants."""


class IoFailureError(VentriqError):
    """A file could not be written."""
