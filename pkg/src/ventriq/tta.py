"""Flip-ensemble prediction fusion (test-time augmentation).

The segmenter runs on the frame and its three flip variants; each prediction
is mapped back to the original orientation (every flip is its own inverse),
the four soft masks are averaged element-wise in double precision, and the
mean is thresholded at 0.2. Because the transform set is the full flip
group, the whole construction is exactly flip-equivariant for ANY
segmenter, equivariant or not.
"""

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatchError, EmptyListError
from .imaging import binarize, flip
from .segmentation import SegmenterSpec, segment

TRANSFORMS = ("identity", "horizontal", "vertical", "both")

DEFAULT_THRESHOLD = 0.2


@dataclass(frozen=True)
class TtaConfig:
    enabled: bool = True
    threshold: float = DEFAULT_THRESHOLD
    transforms: tuple[str, ...] = TRANSFORMS

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [0, 1], got {self.threshold}")
        if set(self.transforms) != set(TRANSFORMS) or len(self.transforms) != 4:
            raise ValueError("transforms must be exactly the four-element flip group")


def apply_transform(image: np.ndarray, name: str) -> np.ndarray:
    """Apply one flip-group element; 'identity' is a no-op."""
    if name == "identity":
        return np.asarray(image)
    return flip(image, name)


def ensemble_average(masks: Sequence[np.ndarray]) -> np.ndarray:
    """Element-wise arithmetic mean of same-shaped soft masks, in float64."""
    if len(masks) == 0:
        raise EmptyListError("cannot average zero masks")
    first = np.asarray(masks[0], dtype=np.float64)
    acc = first.copy()
    for m in masks[1:]:
        arr = np.asarray(m, dtype=np.float64)
        if arr.shape != first.shape:
            raise DimensionMismatchError(
                f"mask shapes differ: {arr.shape} vs {first.shape}"
            )
        acc += arr
    return acc / len(masks)


def tta_segment(
    frame: np.ndarray,
    spec: SegmenterSpec,
    cfg: TtaConfig,
    index: int = 0,
    segment_fn: Callable[[np.ndarray, SegmenterSpec, int], np.ndarray] = segment,
) -> np.ndarray:
    """Segment a frame through the four flip views and fuse to a binary mask.

    Predictions are combined by fixed transform position, not completion
    order, so the result is deterministic. `segment_fn` defaults to the
    built-in segmenter and exists so model backends and test doubles can be
    ensembled the same way.
    """
    if not cfg.enabled:
        raise ValueError("tta_segment called with TTA disabled")
    restored = []
    for name in cfg.transforms:
        view = apply_transform(frame, name)
        pred = segment_fn(view, spec, index)
        restored.append(apply_transform(pred, name))  # each flip is self-inverse
    mean = ensemble_average(restored)
    return binarize(mean, cfg.threshold, inclusive=True)
