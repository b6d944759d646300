"""Cardiac function quantification from heart-video frame sequences.

Measures ejection fraction, fractional shortening, stroke volume, heart rate
and cardiac output from grayscale frames plus ventricle segmentation masks,
with flip-ensemble (TTA) prediction fusion, dataset augmentation, Dice/IoU
evaluation and a synthetic beating-heart generator for verification.
"""

from .errors import VentriqError
from .imaging import (
    binarize,
    fill_holes,
    flip,
    largest_component,
    load_frame_sequence,
    measure_geometry,
    VentricleGeometry,
)
from .segmentation import SegmenterSpec, segment
from .tta import TtaConfig, ensemble_average, tta_segment
from .augment import augment_dataset
from .cardiac import (
    AreaSeries,
    BeatMarkers,
    CalibrationConfig,
    CardiacReport,
    build_report,
    cardiac_output,
    detect_beats,
    ejection_fraction,
    fractional_shortening,
    heart_rate,
    stroke_volume,
    volume_area,
    volume_spheroid,
)
from .metrics import EvalResult, EfErrorReport, dice, ef_error_report, evaluate_set, iou
from .synth import SynthHeartSpec, analytic_report, generate_sequence

__version__ = "0.1.0"

__all__ = [
    "VentriqError",
    "binarize",
    "fill_holes",
    "flip",
    "largest_component",
    "load_frame_sequence",
    "measure_geometry",
    "VentricleGeometry",
    "SegmenterSpec",
    "segment",
    "TtaConfig",
    "ensemble_average",
    "tta_segment",
    "augment_dataset",
    "AreaSeries",
    "BeatMarkers",
    "CalibrationConfig",
    "CardiacReport",
    "build_report",
    "cardiac_output",
    "detect_beats",
    "ejection_fraction",
    "fractional_shortening",
    "heart_rate",
    "stroke_volume",
    "volume_area",
    "volume_spheroid",
    "EvalResult",
    "EfErrorReport",
    "dice",
    "ef_error_report",
    "evaluate_set",
    "iou",
    "SynthHeartSpec",
    "analytic_report",
    "generate_sequence",
]
