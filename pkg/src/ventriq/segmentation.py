"""Pluggable per-frame segmenter producing a soft mask.

Two built-ins: a precomputed-mask loader for masks exported by any external
model, and a reference intensity segmenter for synthetic data and demos.
The contract is one pure function so other backends can slot in without
touching the rest of the pipeline.
"""

import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import DimensionMismatchError, MissingMaskError
from .imaging import load_soft_mask, numeric_sort_key

SEGMENTER_KINDS = ("precomputed", "intensity")
POLARITIES = ("bright_foreground", "dark_foreground")

MASK_EXTENSIONS = {".png", ".pgm", ".f32"}


@dataclass(frozen=True)
class SegmenterSpec:
    """Configuration of a built-in segmenter.

    kind 'precomputed' serves stored masks matched to frames by sequence
    position (numeric file order), so mask and frame directories may use
    different naming schemes. kind 'intensity' thresholds the
    polarity-adjusted pixel intensity.
    """

    kind: str
    mask_dir: Path | None = None
    intensity_threshold: int = 128
    polarity: str = "bright_foreground"

    def __post_init__(self):
        if self.kind not in SEGMENTER_KINDS:
            raise ValueError(f"kind must be one of {SEGMENTER_KINDS}, got {self.kind!r}")
        if self.kind == "precomputed" and self.mask_dir is None:
            raise ValueError("precomputed segmenter requires mask_dir")
        if not 0 <= self.intensity_threshold <= 255:
            raise ValueError(
                f"intensity_threshold must be in [0, 255], got {self.intensity_threshold}"
            )
        if self.polarity not in POLARITIES:
            raise ValueError(f"polarity must be one of {POLARITIES}, got {self.polarity!r}")


@lru_cache(maxsize=32)
def _list_mask_files(mask_dir: str, mtime_ns: int) -> tuple[Path, ...]:
    # mtime_ns keys the cache so a changed directory re-lists
    files = [
        Path(entry.path)
        for entry in os.scandir(mask_dir)
        if entry.is_file() and os.path.splitext(entry.name)[1].lower() in MASK_EXTENSIONS
    ]
    files.sort(key=lambda p: numeric_sort_key(p.name))
    return tuple(files)


def _mask_files(mask_dir: Path) -> tuple[Path, ...]:
    mask_dir = str(mask_dir)
    return _list_mask_files(mask_dir, os.stat(mask_dir).st_mtime_ns)


def segment(frame: np.ndarray, spec: SegmenterSpec, index: int = 0) -> np.ndarray:
    """Segment one frame into a soft mask (float64 probabilities in [0, 1]).

    `index` is the frame's sequence position, used by the precomputed loader
    to pick the matching stored mask.
    """
    frame = np.asarray(frame, dtype=np.uint8)
    if spec.kind == "intensity":
        if spec.polarity == "bright_foreground":
            adjusted = frame.astype(np.int16)
        else:
            adjusted = 255 - frame.astype(np.int16)
        return (adjusted >= spec.intensity_threshold).astype(np.float64)

    files = _mask_files(spec.mask_dir)
    if index < 0 or index >= len(files):
        raise MissingMaskError(index)
    probs = load_soft_mask(files[index], shape=frame.shape)
    if probs.shape != frame.shape:
        raise DimensionMismatchError(
            f"{files[index]}: mask is {probs.shape[1]}x{probs.shape[0]} but frame "
            f"{index} is {frame.shape[1]}x{frame.shape[0]}"
        )
    return probs
