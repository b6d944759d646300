"""Command-line entry point.

Four workflows:

* analyze -- frames + segmenter -> cardiac index CSV
* eval    -- predictions vs truth masks -> Dice/IoU CSV (+ optional EF error CSV)
* augment -- image/mask folder -> flip-expanded training folder
* synth   -- spec -> rendered beating-heart sequence with truth and expected.csv

Exit codes: 0 success, 1 fatal error, 2 completed with per-frame degradation
(some frames excluded for empty segmentations).
"""

import argparse
import csv
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .augment import augment_dataset
from .cardiac import CalibrationConfig, build_report, write_report_csv
from .errors import EmptyMaskError, VentriqError
from .imaging import binarize, fill_holes, largest_component, load_frame_sequence, measure_geometry
from .metrics import ef_error_report, evaluate_set, write_ef_error_csv, write_eval_csv
from .segmentation import SegmenterSpec, segment
from .synth import SynthHeartSpec, generate_sequence, parse_spec_file
from .tta import TtaConfig, tta_segment

DEFAULT_FPS = 250.0
DEFAULT_TTA_THRESHOLD = 0.2
DEFAULT_BINARIZE_THRESHOLD = 0.5


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; the contract reserves 2 for
    # completed-with-warnings, so route usage problems to exit 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="ventriq", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="compute cardiac indices from a frame sequence")
    p.add_argument("--frames", required=True, help="directory of PNG/PGM frames")
    p.add_argument(
        "--segmenter",
        required=True,
        choices=["precomputed", "intensity"],
        help="mask source: stored masks or intensity thresholding",
    )
    p.add_argument("--masks", help="mask directory (precomputed segmenter)")
    p.add_argument(
        "--threshold",
        type=int,
        default=128,
        help="intensity threshold 0-255 (intensity segmenter; default 128)",
    )
    p.add_argument(
        "--polarity",
        choices=["bright_foreground", "dark_foreground"],
        default="bright_foreground",
    )
    p.add_argument("--tta", action="store_true", help="fuse the four flip views")
    p.add_argument(
        "--tta-threshold",
        type=float,
        default=None,
        help=f"binarization threshold after view averaging (default {DEFAULT_TTA_THRESHOLD})",
    )
    p.add_argument(
        "--binarize-threshold",
        type=float,
        default=DEFAULT_BINARIZE_THRESHOLD,
        help="single-view binarization threshold without --tta (default 0.5)",
    )
    p.add_argument("--fps", type=float, default=None, help=f"frame rate (default {DEFAULT_FPS:g})")
    p.add_argument("--um-per-px", type=float, default=None, help="calibration for nL volumes")
    p.add_argument("--volume-method", choices=["eq2", "eq3", "both"], default="both")
    p.add_argument("--fs-axis", choices=["long", "short"], default="long")
    p.add_argument("--smoothing-window", type=int, default=3)
    p.add_argument("--jobs", type=int, default=0, help="worker threads (default: cpu count)")
    p.add_argument("--out", help="report CSV path (default: stdout)")

    p = sub.add_parser("eval", help="score predicted masks against ground truth")
    p.add_argument("--pred", required=True, help="predicted mask directory")
    p.add_argument("--truth", required=True, help="ground-truth mask directory")
    p.add_argument("--out", required=True, help="Dice/IoU CSV path")
    p.add_argument(
        "--ef-table",
        help="CSV of video_id,predicted_ef,manual_ef to aggregate error from",
    )
    p.add_argument("--ef-out", default="ef_errors.csv", help="EF error CSV path")

    p = sub.add_parser("augment", help="expand an image+mask folder by the flip group")
    p.add_argument("--images", required=True)
    p.add_argument("--masks", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("synth", help="render a synthetic beating-heart sequence")
    p.add_argument("--spec", help="flat key = value spec file (default: built-in spec)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--fps", type=float, default=None, help=f"frame rate (default {DEFAULT_FPS:g})")

    return parser


def _make_volume_method(flag: str) -> str:
    return {"eq2": "spheroid_eq2", "eq3": "area_eq3", "both": "both"}[flag]


def _frame_geometry(frame, spec, tta_cfg, binarize_threshold, index):
    if tta_cfg is not None:
        mask = tta_segment(frame, spec, tta_cfg, index=index)
    else:
        mask = binarize(segment(frame, spec, index=index), binarize_threshold)
    try:
        component = largest_component(mask)
    except EmptyMaskError:
        return None
    return measure_geometry(fill_holes(component))


def cmd_analyze(args) -> int:
    if args.segmenter == "precomputed":
        if not args.masks:
            raise _UsageError("--segmenter precomputed requires --masks")
        spec = SegmenterSpec(kind="precomputed", mask_dir=Path(args.masks))
    else:
        spec = SegmenterSpec(
            kind="intensity",
            intensity_threshold=args.threshold,
            polarity=args.polarity,
        )

    # paper-setup defaults are recorded in the warnings column for provenance
    provenance = []
    fps = args.fps
    if fps is None:
        fps = DEFAULT_FPS
        provenance.append(f"fps defaulted to {DEFAULT_FPS:g}")
    tta_cfg = None
    if args.tta:
        threshold = args.tta_threshold
        if threshold is None:
            threshold = DEFAULT_TTA_THRESHOLD
            provenance.append(f"tta threshold defaulted to {DEFAULT_TTA_THRESHOLD:g}")
        tta_cfg = TtaConfig(enabled=True, threshold=threshold)

    cfg = CalibrationConfig(
        fps=fps,
        microns_per_pixel=args.um_per_px,
        smoothing_window=args.smoothing_window,
        volume_method=_make_volume_method(args.volume_method),
        fs_axis=args.fs_axis,
    )

    frames = load_frame_sequence(args.frames)
    jobs = args.jobs if args.jobs > 0 else (os.cpu_count() or 1)

    geometries = []
    if jobs == 1:
        for i, frame in enumerate(frames):
            try:
                geometries.append(
                    _frame_geometry(frame, spec, tta_cfg, args.binarize_threshold, i)
                )
            except VentriqError as exc:
                raise VentriqError(f"frame {i}: {exc}") from exc
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_frame_geometry, frame, spec, tta_cfg, args.binarize_threshold, i)
                for i, frame in enumerate(frames)
            ]
            for i, fut in enumerate(futures):
                try:
                    geometries.append(fut.result())
                except VentriqError as exc:
                    raise VentriqError(f"frame {i}: {exc}") from exc

    report = build_report(geometries, cfg, extra_warnings=provenance)
    video_id = Path(args.frames).resolve().name
    if args.out:
        write_report_csv(args.out, [(video_id, report)])
    else:
        from .cardiac import REPORT_CSV_HEADER, report_csv_row

        print(REPORT_CSV_HEADER)
        print(report_csv_row(video_id, report))
    degraded = any(w.startswith("excluded") for w in report.warnings)
    return 2 if degraded else 0


def cmd_eval(args) -> int:
    results, mean_dice, mean_iou = evaluate_set(args.pred, args.truth)
    write_eval_csv(args.out, results, mean_dice, mean_iou)
    print(f"pairs: {len(results)}  mean dice: {mean_dice:.6g}  mean iou: {mean_iou:.6g}")
    if args.ef_table:
        with open(args.ef_table, newline="") as fh:
            reader = csv.DictReader(fh)
            entries = [
                (row["video_id"], float(row["predicted_ef"]), float(row["manual_ef"]))
                for row in reader
            ]
        report = ef_error_report(entries)
        write_ef_error_csv(args.ef_out, report)
        print(
            f"ef errors: cumulative {report.cumulative_abs_error:.6g}  "
            f"mean {report.mean_abs_error:.6g}"
        )
    return 0


def cmd_augment(args) -> int:
    written = augment_dataset(args.images, args.masks, args.out)
    print(f"wrote {written} pairs to {args.out}")
    return 0


def cmd_synth(args) -> int:
    spec = parse_spec_file(args.spec) if args.spec else SynthHeartSpec()
    fps = args.fps if args.fps is not None else DEFAULT_FPS
    n = generate_sequence(spec, fps, args.out)
    print(f"wrote {n} frames (and truth masks) to {args.out}")
    return 0


_COMMANDS = {
    "analyze": cmd_analyze,
    "eval": cmd_eval,
    "augment": cmd_augment,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except VentriqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
