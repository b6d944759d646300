"""Segmentation overlap metrics and index-error aggregation.

Dice and IoU compare predicted masks against ground truth; the error report
sums and averages absolute index differences (EF, FS or any scalar) against
manual values across videos.
"""

import warnings as _warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, EmptyListError, EmptySetError, PairCountMismatchError
from .imaging import list_image_files, load_binary_mask


@dataclass(frozen=True)
class EvalResult:
    pair_id: str
    dice: float
    iou: float


@dataclass(frozen=True)
class EfErrorReport:
    """Per-video absolute errors against manual measurement, plus aggregates."""

    per_video: tuple[tuple[str, float, float, float], ...]  # (id, predicted, manual, abs_error)
    cumulative_abs_error: float
    mean_abs_error: float


def _overlap_counts(a: np.ndarray, b: np.ndarray) -> tuple[int, int, int]:
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"mask shapes differ: {a.shape} vs {b.shape}")
    inter = int(np.count_nonzero(a & b))
    return inter, int(np.count_nonzero(a)), int(np.count_nonzero(b))


def dice(a: np.ndarray, b: np.ndarray) -> float:
    """Dice coefficient 2|A&B| / (|A|+|B|); two empty masks score 1.0."""
    inter, na, nb = _overlap_counts(a, b)
    if na + nb == 0:
        _warnings.warn("both masks empty; dice defined as 1.0", stacklevel=2)
        return 1.0
    return 2.0 * inter / (na + nb)


def iou(a: np.ndarray, b: np.ndarray) -> float:
    """Intersection over union: shared area over total area; two empty
    masks score 1.0."""
    inter, na, nb = _overlap_counts(a, b)
    union = na + nb - inter
    if union == 0:
        _warnings.warn("both masks empty; iou defined as 1.0", stacklevel=2)
        return 1.0
    return inter / union


def evaluate_set(pred_dir, truth_dir) -> tuple[list[EvalResult], float, float]:
    """Score every prediction/truth pair (numeric file order).

    Returns (results, mean_dice, mean_iou) with unweighted arithmetic means.
    """
    preds = list_image_files(pred_dir)
    truths = list_image_files(truth_dir)
    if not preds and not truths:
        raise EmptySetError(f"no mask pairs under {pred_dir} and {truth_dir}")
    if len(preds) != len(truths):
        raise PairCountMismatchError(
            f"{len(preds)} predictions vs {len(truths)} truth masks"
        )
    results = []
    for p, t in zip(preds, truths):
        a = load_binary_mask(p)
        b = load_binary_mask(t)
        if a.shape != b.shape:
            raise DimensionMismatchError(
                f"pair {p.name}/{t.name}: {a.shape[1]}x{a.shape[0]} vs "
                f"{b.shape[1]}x{b.shape[0]}"
            )
        results.append(EvalResult(pair_id=p.stem, dice=dice(a, b), iou=iou(a, b)))
    mean_dice = float(np.mean([r.dice for r in results]))
    mean_iou = float(np.mean([r.iou for r in results]))
    return results, mean_dice, mean_iou


def ef_error_report(entries: Sequence[tuple[str, float, float]]) -> EfErrorReport:
    """Absolute per-video errors of predicted vs manual values, summed and averaged.

    Works for EF, FS or any scalar index compared the same way.
    """
    if not entries:
        raise EmptyListError("no (video_id, predicted, manual) entries")
    per_video = tuple(
        (str(vid), float(pred), float(manual), abs(float(pred) - float(manual)))
        for vid, pred, manual in entries
    )
    cumulative = float(sum(row[3] for row in per_video))
    return EfErrorReport(
        per_video=per_video,
        cumulative_abs_error=cumulative,
        mean_abs_error=cumulative / len(per_video),
    )


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def write_eval_csv(path, results: Sequence[EvalResult], mean_dice: float, mean_iou: float) -> None:
    """Per-pair Dice/IoU rows plus a trailing MEAN aggregate row."""
    lines = ["pair_id,dice,iou"]
    lines.extend(f"{r.pair_id},{_fmt(r.dice)},{_fmt(r.iou)}" for r in results)
    lines.append(f"MEAN,{_fmt(mean_dice)},{_fmt(mean_iou)}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_ef_error_csv(path, report: EfErrorReport) -> None:
    """Per-video error rows plus CUMULATIVE and MEAN aggregate rows."""
    lines = ["video_id,predicted_ef,manual_ef,abs_error"]
    lines.extend(
        f"{vid},{_fmt(pred)},{_fmt(manual)},{_fmt(err)}"
        for vid, pred, manual, err in report.per_video
    )
    lines.append(f"CUMULATIVE,,,{_fmt(report.cumulative_abs_error)}")
    lines.append(f"MEAN,,,{_fmt(report.mean_abs_error)}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
