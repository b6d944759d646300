"""Offline dataset augmentation by the flip group.

Expands an image+mask training folder four-fold (original plus horizontal,
vertical and combined flips), applying the same transform to each image and
its mask so the pairing survives.
"""

import warnings
from pathlib import Path

import numpy as np

from .errors import DimensionMismatchError, PairCountMismatchError
from .imaging import flip, list_image_files, load_gray_image, save_gray_image

# suffix -> transform; identity copies let out_dir stand alone as a full set
VARIANTS = (
    ("_id", None),
    ("_h", "horizontal"),
    ("_v", "vertical"),
    ("_hv", "both"),
)


def _write_variants(src: np.ndarray, stem: str, ext: str, out_sub: Path) -> None:
    for suffix, axis in VARIANTS:
        out = src if axis is None else flip(src, axis)
        save_gray_image(out_sub / f"{stem}{suffix}{ext}", out)


def augment_dataset(images_dir, masks_dir, out_dir) -> int:
    """Write the four flip variants of every image/mask pair.

    Pairs match by numeric filename order and must agree in dimensions.
    Returns the number of pairs written (4x the input count).
    """
    images = list_image_files(images_dir)
    masks = list_image_files(masks_dir)
    if len(images) != len(masks):
        raise PairCountMismatchError(
            f"{len(images)} images vs {len(masks)} masks cannot pair up"
        )
    out_dir = Path(out_dir)
    out_images = out_dir / "images"
    out_masks = out_dir / "masks"
    if not images:
        warnings.warn("no input pairs; nothing to augment", stacklevel=2)
        return 0
    out_images.mkdir(parents=True, exist_ok=True)
    out_masks.mkdir(parents=True, exist_ok=True)

    for img_path, mask_path in zip(images, masks):
        img = load_gray_image(img_path)
        mask = load_gray_image(mask_path)
        if img.shape != mask.shape:
            raise DimensionMismatchError(
                f"pair {img_path.name}/{mask_path.name}: image "
                f"{img.shape[1]}x{img.shape[0]} vs mask {mask.shape[1]}x{mask.shape[0]}"
            )
        _write_variants(img, img_path.stem, img_path.suffix, out_images)
        _write_variants(mask, mask_path.stem, mask_path.suffix, out_masks)

    return 4 * len(images)
