"""Raster image types, file I/O, binary-mask morphology and ventricle geometry.

Raster conventions (all 2-D numpy arrays, row-major, shape (height, width)):

* gray frame  -- uint8 intensities 0..255
* soft mask   -- float64 probabilities in [0, 1]
* binary mask -- bool membership

A pixel at column x, row y is the point (x, y); coordinates are pixel
centers. Frames in a sequence are identified by list position, in numeric
filename order.
"""

import os
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from . import kernels
from .errors import (
    DimensionMismatchError,
    EmptyDirectoryError,
    EmptyMaskError,
    MixedDimensionsError,
    UnsupportedFormatError,
)

IMAGE_EXTENSIONS = {".png", ".pgm"}
# recognizably image files we refuse rather than silently skip
REJECTED_EXTENSIONS = {".jpg", ".jpeg", ".bmp", ".tif", ".tiff", ".gif", ".webp"}

FLIP_AXES = ("horizontal", "vertical", "both")


@dataclass(frozen=True)
class VentricleGeometry:
    """Per-frame measurement of the segmented ventricle.

    Attributes:
        area: foreground pixel count.
        long_axis: length (px) of the major axis of the moment-equivalent
            solid ellipse.
        short_axis: minor-axis length (px); always <= long_axis.
        centroid: (x, y) sub-pixel foreground centroid.
    """

    area: float
    long_axis: float
    short_axis: float
    centroid: tuple[float, float]

    def __post_init__(self):
        if self.area <= 0:
            raise EmptyMaskError("geometry requires a non-empty mask")
        if not self.long_axis >= self.short_axis > 0:
            raise ValueError(
                f"axes must satisfy long >= short > 0, got "
                f"({self.long_axis}, {self.short_axis})"
            )

    def axis(self, which: str) -> float:
        if which == "long":
            return self.long_axis
        if which == "short":
            return self.short_axis
        raise ValueError(f"axis must be 'long' or 'short', got {which!r}")


def numeric_sort_key(name: str):
    """Sort key: first integer run in the stem, falling back to lexicographic.

    Guarantees frame_10 follows frame_9.
    """
    stem = Path(name).stem
    m = re.search(r"\d+", stem)
    if m:
        return (0, int(m.group()), name)
    return (1, 0, name)


def list_image_files(dir_path) -> list[Path]:
    """Image files of a directory in numeric filename order."""
    files = []
    for entry in os.scandir(dir_path):
        if not entry.is_file():
            continue
        ext = os.path.splitext(entry.name)[1].lower()
        if ext in IMAGE_EXTENSIONS:
            files.append(Path(entry.path))
        elif ext in REJECTED_EXTENSIONS:
            raise UnsupportedFormatError(
                f"{entry.path}: only 8-bit PNG or PGM frames are supported"
            )
    files.sort(key=lambda p: numeric_sort_key(p.name))
    return files


def load_gray_image(path) -> np.ndarray:
    """Read an 8-bit single-channel PNG/PGM into a uint8 array."""
    path = Path(path)
    if path.suffix.lower() not in IMAGE_EXTENSIONS:
        raise UnsupportedFormatError(f"{path}: only 8-bit PNG or PGM frames are supported")
    try:
        img = Image.open(path)
        img.load()
    except Exception as exc:
        raise UnsupportedFormatError(f"{path}: {exc}") from exc
    if img.mode != "L":
        raise UnsupportedFormatError(f"{path}: expected 8-bit grayscale, got mode {img.mode}")
    return np.asarray(img, dtype=np.uint8)


def save_gray_image(path, pixels: np.ndarray) -> None:
    """Write a uint8 array as PNG or binary PGM, by extension."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix not in IMAGE_EXTENSIONS:
        raise UnsupportedFormatError(f"{path}: only PNG or PGM output is supported")
    arr = np.ascontiguousarray(pixels, dtype=np.uint8)
    img = Image.fromarray(arr, mode="L")
    if suffix == ".png":
        # low compression: these are intermediate pipeline files, speed wins
        img.save(path, compress_level=1)
    else:
        img.save(path)


def load_soft_mask(path, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Read a soft mask: 8-bit image scaled to value/255, or raw .f32 sidecar.

    The .f32 format is headerless little-endian float32, row-major, so the
    target shape must be supplied for it.
    """
    path = Path(path)
    if path.suffix.lower() == ".f32":
        if shape is None:
            raise UnsupportedFormatError(f"{path}: .f32 sidecar needs an explicit shape")
        raw = np.fromfile(path, dtype="<f4")
        if raw.size != shape[0] * shape[1]:
            raise DimensionMismatchError(
                f"{path}: {raw.size} values cannot fill shape {shape}"
            )
        probs = raw.reshape(shape).astype(np.float64)
        if probs.min() < 0.0 or probs.max() > 1.0:
            raise UnsupportedFormatError(f"{path}: probabilities outside [0, 1]")
        return probs
    return load_gray_image(path).astype(np.float64) / 255.0


def save_soft_mask_f32(path, probs: np.ndarray) -> None:
    """Write probabilities as a raw little-endian float32 sidecar."""
    np.ascontiguousarray(probs, dtype="<f4").tofile(Path(path))


def load_binary_mask(path) -> np.ndarray:
    """Read a stored mask image; any nonzero pixel counts as foreground."""
    return load_gray_image(path) > 0


def save_binary_mask(path, mask: np.ndarray) -> None:
    """Write a boolean mask as an image with foreground = 255."""
    save_gray_image(path, np.where(np.asarray(mask, dtype=bool), 255, 0).astype(np.uint8))


def load_frame_sequence(dir_path) -> list[np.ndarray]:
    """Load every frame of a directory in ascending numeric filename order.

    All frames must share identical dimensions; the returned list position is
    the frame's sequence index.
    """
    files = list_image_files(dir_path)
    if not files:
        raise EmptyDirectoryError(f"no PNG/PGM frames in {dir_path}")
    frames = []
    shape = None
    for p in files:
        arr = load_gray_image(p)
        if shape is None:
            shape = arr.shape
        elif arr.shape != shape:
            raise MixedDimensionsError(
                f"{p}: {arr.shape[1]}x{arr.shape[0]} differs from first frame "
                f"{shape[1]}x{shape[0]}"
            )
        frames.append(arr)
    return frames


def binarize(soft_mask: np.ndarray, threshold: float, inclusive: bool = True) -> np.ndarray:
    """Threshold a soft mask into a boolean one.

    A pixel is foreground iff its probability >= threshold (inclusive, the
    default) or > threshold. Inclusive keeps a pixel that exactly one of four
    ensemble views predicted at full confidence when thresholding at 0.2.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    probs = np.asarray(soft_mask, dtype=np.float64)
    return probs >= threshold if inclusive else probs > threshold


def flip(image: np.ndarray, axis: str) -> np.ndarray:
    """Reflect an image: 'horizontal' reverses columns, 'vertical' rows,
    'both' composes them. Works for frames, soft masks and binary masks."""
    arr = np.asarray(image)
    if axis == "horizontal":
        out = arr[:, ::-1]
    elif axis == "vertical":
        out = arr[::-1, :]
    elif axis == "both":
        out = arr[::-1, ::-1]
    else:
        raise ValueError(f"axis must be one of {FLIP_AXES}, got {axis!r}")
    return np.ascontiguousarray(out)


def largest_component(mask: np.ndarray) -> np.ndarray:
    """Keep only the largest 8-connected foreground component.

    Ties break toward the component whose first row-major foreground pixel
    comes earliest, which is also how the labeling kernel numbers components.
    """
    m = np.asarray(mask, dtype=bool)
    labels, count = kernels.label_components(m, 8)
    if count == 0:
        raise EmptyMaskError("mask has no foreground pixel")
    sizes = np.bincount(labels.ravel(), minlength=count + 1)[1:]
    best = int(np.argmax(sizes)) + 1  # argmax returns the lowest tied label
    return labels == best


def fill_holes(mask: np.ndarray) -> np.ndarray:
    """Fill background regions not 4-connected to the image border.

    Foreground is left untouched; 4-connected background against 8-connected
    foreground avoids diagonal leaks.
    """
    m = np.asarray(mask, dtype=bool)
    bg = ~m
    labels, count = kernels.label_components(bg, 4)
    if count == 0:
        return m.copy()
    border_connected = np.zeros(count + 1, dtype=bool)
    for edge in (labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]):
        border_connected[edge] = True
    holes = bg & ~border_connected[labels]
    return m | holes


def measure_geometry(mask: np.ndarray) -> VentricleGeometry:
    """Measure area, centroid and axis lengths of the mask foreground.

    Axes come from the moment-equivalent solid ellipse: with eigenvalues
    l1 >= l2 of the coordinate covariance matrix, the axes are 4*sqrt(l1)
    and 4*sqrt(l2) (a uniform solid ellipse with semi-axis a has coordinate
    variance a^2/4, so the full axis is recovered exactly). Axes are floored
    at one pixel so degenerate masks keep a physical extent.
    """
    m = np.asarray(mask, dtype=bool)
    ys, xs = np.nonzero(m)
    if xs.size == 0:
        raise EmptyMaskError("mask has no foreground pixel")
    area = float(xs.size)
    cx = float(xs.mean())
    cy = float(ys.mean())
    dx = xs - cx
    dy = ys - cy
    cov = np.array(
        [
            [np.mean(dx * dx), np.mean(dx * dy)],
            [np.mean(dx * dy), np.mean(dy * dy)],
        ]
    )
    lam2, lam1 = np.linalg.eigvalsh(cov)  # ascending
    long_axis = max(4.0 * float(np.sqrt(max(lam1, 0.0))), 1.0)
    short_axis = max(4.0 * float(np.sqrt(max(lam2, 0.0))), 1.0)
    return VentricleGeometry(
        area=area, long_axis=long_axis, short_axis=short_axis, centroid=(cx, cy)
    )
