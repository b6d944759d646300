"""Cardiac index engine.

Turns a per-frame ventricle geometry sequence into the clinical indices:
end-diastolic and end-systolic volumes, stroke volume, ejection fraction,
fractional shortening, heart rate and cardiac output. End-diastole is the
frame of maximum ventricle area, end-systole the minimum.

Two interchangeable volume models are supported:

* ``spheroid_eq2`` -- prolate spheroid from the two axes: pi/6 * D_L * D_S^2
* ``area_eq3``     -- area-based, shape-agnostic: 8 / (3 * pi * D_L) * A^2

For a perfect ellipse the two agree exactly (both reduce to pi/6*D_L*D_S^2).
Volumes are px^3 unless a microns-per-pixel calibration converts them to
nanoliters (1 nL = 1e6 um^3).
"""

import math
import warnings as _warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    AxisOrderViolationError,
    ConstantSeriesError,
    InsufficientBeatsError,
    MissingHeartRateError,
    NegativeStrokeVolumeError,
    NoCompleteBeatError,
    NonPositiveAreaError,
    NonPositiveAxisError,
    NonPositiveDiastolicDiameterError,
    NoValidFramesError,
    SeriesTooShortError,
    SystolicExceedsDiastolicError,
    TooManyEmptyFramesError,
    ZeroEDVError,
)
from .imaging import VentricleGeometry

VOLUME_METHODS = ("spheroid_eq2", "area_eq3", "both")
FS_AXES = ("long", "short")

DEFAULT_FPS = 250.0

# fraction of empty frames above which a run is considered corrupt
MAX_EMPTY_FRAME_FRACTION = 0.20

REPORT_CSV_HEADER = (
    "video_id,n_frames,ed_frame,es_frame,ed_area_px,es_area_px,"
    "dl_ed_px,ds_ed_px,dl_es_px,ds_es_px,edv,esv,sv,"
    "ef_pct_eq2,ef_pct_eq3,fs,hr_bpm,co,volume_units,warnings"
)


@dataclass(frozen=True, eq=False)
class AreaSeries:
    """Ventricle area over time.

    `frame_indices` maps series positions back to original frame numbers;
    frames dropped for empty segmentations leave gaps there.
    """

    areas: np.ndarray
    fps: float = DEFAULT_FPS
    frame_indices: np.ndarray | None = None

    def __post_init__(self):
        areas = np.asarray(self.areas, dtype=np.float64)
        object.__setattr__(self, "areas", areas)
        if areas.ndim != 1 or areas.size == 0:
            raise ValueError("areas must be a non-empty 1-D sequence")
        if np.any(areas <= 0):
            raise ValueError("all areas must be > 0 (empty frames are gaps, not zeros)")
        if self.fps <= 0:
            raise ValueError(f"fps must be > 0, got {self.fps}")
        if self.frame_indices is None:
            object.__setattr__(self, "frame_indices", np.arange(areas.size))
        else:
            idx = np.asarray(self.frame_indices, dtype=np.int64)
            if idx.shape != areas.shape or np.any(np.diff(idx) <= 0):
                raise ValueError("frame_indices must be ascending and match areas")
            object.__setattr__(self, "frame_indices", idx)

    def __len__(self) -> int:
        return self.areas.size


@dataclass(frozen=True)
class BeatMarkers:
    """Detected cardiac phase markers, in original frame indices.

    ed_frames/es_frames are the per-cycle extrema; global_ed/global_es are
    the single frames of maximum and minimum raw area that drive the
    headline volume computation.
    """

    ed_frames: tuple[int, ...]
    es_frames: tuple[int, ...]
    global_ed: int
    global_es: int

    def __post_init__(self):
        for name in ("ed_frames", "es_frames"):
            seq = tuple(int(v) for v in getattr(self, name))
            object.__setattr__(self, name, seq)
            if any(b <= a for a, b in zip(seq, seq[1:])):
                raise ValueError(f"{name} must be strictly ascending")


@dataclass(frozen=True)
class CalibrationConfig:
    """Run configuration: timing, scale and method switches."""

    fps: float = DEFAULT_FPS
    microns_per_pixel: Optional[float] = None
    smoothing_window: int = 3
    volume_method: str = "both"
    fs_axis: str = "long"

    def __post_init__(self):
        if self.fps <= 0:
            raise ValueError(f"fps must be > 0, got {self.fps}")
        if self.microns_per_pixel is not None and self.microns_per_pixel <= 0:
            raise ValueError("microns_per_pixel must be > 0 when given")
        if self.smoothing_window < 1 or self.smoothing_window % 2 == 0:
            raise ValueError(
                f"smoothing_window must be an odd integer >= 1, got {self.smoothing_window}"
            )
        if self.volume_method not in VOLUME_METHODS:
            raise ValueError(f"volume_method must be one of {VOLUME_METHODS}")
        if self.fs_axis not in FS_AXES:
            raise ValueError(f"fs_axis must be one of {FS_AXES}")


@dataclass(frozen=True)
class CardiacReport:
    """Assembled indices for one analyzed video."""

    n_frames: int
    ed_frame: int
    es_frame: int
    ed_geometry: VentricleGeometry
    es_geometry: VentricleGeometry
    edv: float
    esv: float
    sv: float
    ef_pct: float
    ef_pct_eq2: Optional[float]
    ef_pct_eq3: Optional[float]
    fs: float
    hr_bpm: Optional[float]
    co: Optional[float]
    volume_units: str
    per_beat_ef: Optional[tuple[float, ...]] = None
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.esv > self.edv:
            raise NegativeStrokeVolumeError(
                f"esv {self.esv} exceeds edv {self.edv}"
            )
        if abs(self.ef_pct - 100.0 * self.sv / self.edv) > 1e-9:
            raise ValueError("ef_pct inconsistent with 100*sv/edv")
        if not 0.0 <= self.ef_pct < 100.0:
            raise ValueError(f"ef_pct out of range: {self.ef_pct}")


# --- scalar index formulas ----------------------------------------------------


def fractional_shortening(d_d: float, d_s: float) -> float:
    """Relative diameter decrease from diastole to systole: (d_d - d_s) / d_d."""
    if d_d <= 0:
        raise NonPositiveDiastolicDiameterError(f"diastolic diameter {d_d} must be > 0")
    if d_s < 0:
        raise ValueError(f"systolic diameter must be >= 0, got {d_s}")
    if d_s > d_d:
        raise SystolicExceedsDiastolicError(
            f"systolic diameter {d_s} exceeds diastolic {d_d}"
        )
    if d_s == 0:
        _warnings.warn("systolic diameter is zero; fs at degenerate boundary 1.0", stacklevel=2)
    return (d_d - d_s) / d_d


def volume_spheroid(d_l: float, d_s: float) -> float:
    """Prolate-spheroid volume from long and short diameters: pi/6 * D_L * D_S^2."""
    if d_l <= 0 or d_s <= 0:
        raise NonPositiveAxisError(f"axes must be > 0, got ({d_l}, {d_s})")
    if d_l < d_s:
        raise AxisOrderViolationError(f"long axis {d_l} shorter than short axis {d_s}")
    return math.pi / 6.0 * d_l * d_s * d_s


def volume_area(a: float, d_l: float) -> float:
    """Shape-agnostic volume from 2-D area and long diameter: 8 A^2 / (3 pi D_L)."""
    if a <= 0:
        raise NonPositiveAreaError(f"area must be > 0, got {a}")
    if d_l <= 0:
        raise NonPositiveAxisError(f"long axis must be > 0, got {d_l}")
    return 8.0 / (3.0 * math.pi * d_l) * a * a


def stroke_volume(edv: float, esv: float) -> float:
    """Volume ejected per beat: EDV - ESV."""
    if esv < 0:
        raise ValueError(f"esv must be >= 0, got {esv}")
    if esv > edv:
        raise NegativeStrokeVolumeError(
            f"esv {esv} exceeds edv {edv}; ED/ES labels look swapped"
        )
    if esv == edv:
        _warnings.warn("zero stroke volume", stacklevel=2)
    return edv - esv


def ejection_fraction(edv: float, esv: float) -> float:
    """Percentage of diastolic volume ejected per beat: 100 * (EDV - ESV) / EDV."""
    if edv <= 0:
        raise ZeroEDVError(f"edv must be > 0, got {edv}")
    if esv < 0:
        raise ValueError(f"esv must be >= 0, got {esv}")
    if esv > edv:
        raise NegativeStrokeVolumeError(
            f"esv {esv} exceeds edv {edv}; ED/ES labels look swapped"
        )
    return 100.0 * (edv - esv) / edv


def cardiac_output(sv: float, hr_bpm: Optional[float]) -> float:
    """Volume pumped per minute: SV * HR. Unit-agnostic multiply."""
    if hr_bpm is None or hr_bpm <= 0:
        raise MissingHeartRateError("heart rate unavailable; cannot compute cardiac output")
    if sv < 0:
        raise ValueError(f"sv must be >= 0, got {sv}")
    if sv == 0:
        _warnings.warn("zero stroke volume gives zero cardiac output", stacklevel=2)
    return sv * hr_bpm


# --- beat detection -------------------------------------------------------------


def moving_average(values: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average; the window shrinks symmetrically at the edges."""
    values = np.asarray(values, dtype=np.float64)
    n = values.size
    half = window // 2
    csum = np.concatenate([[0.0], np.cumsum(values)])
    idx = np.arange(n)
    k = np.minimum(half, np.minimum(idx, n - 1 - idx))
    lo = idx - k
    hi = idx + k + 1
    return (csum[hi] - csum[lo]) / (hi - lo)


def _guarded_extrema(smoothed: np.ndarray, guard: int, find_max: bool) -> list[int]:
    """Interior samples strictly dominating every neighbor within the guard."""
    n = smoothed.size
    out = []
    for i in range(1, n - 1):
        lo = max(0, i - guard)
        hi = min(n, i + guard + 1)
        neighbors = np.concatenate([smoothed[lo:i], smoothed[i + 1 : hi]])
        if find_max:
            if np.all(smoothed[i] > neighbors):
                out.append(i)
        else:
            if np.all(smoothed[i] < neighbors):
                out.append(i)
    return out


def _dominant_period(smoothed: np.ndarray) -> int:
    """Distance between the two largest distinct simple maxima.

    Falls back to the series length when fewer than two exist; the guard
    floor keeps a degenerate estimate harmless.
    """
    n = smoothed.size
    interior = np.arange(1, n - 1)
    is_max = (smoothed[interior] > smoothed[interior - 1]) & (
        smoothed[interior] > smoothed[interior + 1]
    )
    peaks = interior[is_max]
    if peaks.size < 2:
        return n
    order = peaks[np.argsort(smoothed[peaks], kind="stable")[::-1]]
    return int(abs(int(order[0]) - int(order[1])))


def detect_beats(series: AreaSeries, cfg: CalibrationConfig) -> BeatMarkers:
    """Locate per-cycle ED/ES frames and the global area extremes.

    Per-cycle markers come from the smoothed series: a sample qualifies when
    it strictly dominates every neighbor within a guard distance of a
    quarter of the dominant period (estimated from the two largest smoothed
    maxima; floor of 2 frames). Series endpoints never qualify. The global
    ED/ES come from the raw series, first occurrence winning ties.
    """
    raw = series.areas
    n = raw.size
    if n < 3:
        raise SeriesTooShortError(f"need >= 3 samples, got {n}")
    fi = series.frame_indices
    if np.all(raw == raw[0]):
        raise ConstantSeriesError(
            "constant area series has no extrema",
            markers=BeatMarkers((), (), int(fi[0]), int(fi[0])),
        )

    global_ed = int(fi[int(np.argmax(raw))])
    global_es = int(fi[int(np.argmin(raw))])

    smoothed = moving_average(raw, cfg.smoothing_window)
    period = _dominant_period(smoothed)
    guard = max(2, period // 4)
    ed_pos = _guarded_extrema(smoothed, guard, find_max=True)
    es_pos = _guarded_extrema(smoothed, guard, find_max=False)
    if not ed_pos and not es_pos:
        raise NoCompleteBeatError(
            "series is monotone; no complete beat",
            markers=BeatMarkers((), (), global_ed, global_es),
        )
    return BeatMarkers(
        ed_frames=tuple(int(fi[p]) for p in ed_pos),
        es_frames=tuple(int(fi[p]) for p in es_pos),
        global_ed=global_ed,
        global_es=global_es,
    )


def heart_rate(markers: BeatMarkers, fps: float) -> float:
    """Beats per minute from the mean ED-to-ED interval: 60 * fps / mean."""
    ed = markers.ed_frames
    if len(ed) < 2:
        raise InsufficientBeatsError(
            f"need >= 2 ED markers for heart rate, got {len(ed)}"
        )
    intervals = np.diff(np.asarray(ed, dtype=np.float64))
    return 60.0 * fps / float(intervals.mean())


# --- report assembly --------------------------------------------------------------


def _volumes(g: VentricleGeometry, method: str) -> float:
    if method == "area_eq3":
        return volume_area(g.area, g.long_axis)
    return volume_spheroid(g.long_axis, g.short_axis)


def build_report(
    geometries: Sequence[Optional[VentricleGeometry]],
    cfg: CalibrationConfig,
    extra_warnings: Sequence[str] = (),
) -> CardiacReport:
    """Assemble the full index report from per-frame geometry.

    `geometries` holds one entry per frame; None marks frames whose
    segmentation came back empty. Those are excluded from the area series
    with a warning; more than 20% excluded fails the run.
    """
    total = len(geometries)
    valid = [(i, g) for i, g in enumerate(geometries) if g is not None]
    if not valid:
        raise NoValidFramesError("every frame produced an empty segmentation")
    excluded = [i for i, g in enumerate(geometries) if g is None]
    if len(excluded) > MAX_EMPTY_FRAME_FRACTION * total:
        raise TooManyEmptyFramesError(
            f"{len(excluded)}/{total} frames empty exceeds "
            f"{MAX_EMPTY_FRAME_FRACTION:.0%}: {' '.join(map(str, excluded))}"
        )

    notes = list(extra_warnings)
    if excluded:
        notes.append(
            f"excluded {len(excluded)} empty frames: {' '.join(map(str, excluded))}"
        )

    idxs = np.array([i for i, _ in valid], dtype=np.int64)
    areas = np.array([g.area for _, g in valid], dtype=np.float64)
    series = AreaSeries(areas=areas, fps=cfg.fps, frame_indices=idxs)

    try:
        markers = detect_beats(series, cfg)
    except SeriesTooShortError:
        markers = BeatMarkers(
            (), (), int(idxs[int(np.argmax(areas))]), int(idxs[int(np.argmin(areas))])
        )
        notes.append("series too short for beat detection")
    except NoCompleteBeatError as exc:
        markers = exc.markers
        notes.append("no complete beat detected")
    except ConstantSeriesError as exc:
        markers = exc.markers
        notes.append("constant area series; no beats detected")

    ed_frame, es_frame = markers.global_ed, markers.global_es
    g_ed = geometries[ed_frame]
    g_es = geometries[es_frame]
    assert g_ed is not None and g_es is not None

    ef2 = ef3 = None
    if cfg.volume_method in ("spheroid_eq2", "both"):
        ef2 = ejection_fraction(
            _volumes(g_ed, "spheroid_eq2"), _volumes(g_es, "spheroid_eq2")
        )
    if cfg.volume_method in ("area_eq3", "both"):
        ef3 = ejection_fraction(_volumes(g_ed, "area_eq3"), _volumes(g_es, "area_eq3"))
    primary = "area_eq3" if cfg.volume_method == "area_eq3" else "spheroid_eq2"
    edv = _volumes(g_ed, primary)
    esv = _volumes(g_es, primary)
    ef = ef3 if primary == "area_eq3" else ef2
    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore")
        sv = stroke_volume(edv, esv)
        fs = fractional_shortening(g_ed.axis(cfg.fs_axis), g_es.axis(cfg.fs_axis))
    if sv == 0:
        notes.append("zero stroke volume")
    if fs == 0.0 or fs == 1.0:
        notes.append("degenerate fs")

    try:
        hr = heart_rate(markers, cfg.fps)
    except InsufficientBeatsError:
        hr = None
        notes.append("insufficient beats; hr and co omitted")
    co = cardiac_output(sv, hr) if hr is not None and sv > 0 else (
        0.0 if hr is not None else None
    )

    per_beat = None
    if len(markers.ed_frames) >= 2:
        positions = np.searchsorted(idxs, np.asarray(markers.ed_frames))
        beats = []
        for a, b in zip(positions, positions[1:]):
            window = areas[a : b + 1]
            g_max = geometries[int(idxs[a + int(np.argmax(window))])]
            g_min = geometries[int(idxs[a + int(np.argmin(window))])]
            try:
                beats.append(
                    ejection_fraction(_volumes(g_max, primary), _volumes(g_min, primary))
                )
            except NegativeStrokeVolumeError:
                notes.append("skipped a beat with inverted volumes")
        per_beat = tuple(beats) if beats else None

    if cfg.microns_per_pixel is not None:
        scale = cfg.microns_per_pixel ** 3 / 1e6  # px^3 -> um^3 -> nL
        edv *= scale
        esv *= scale
        sv *= scale
        if co is not None:
            co *= scale
        units = "nL"
    else:
        units = "px3"
        notes.append("uncalibrated; volumes in px^3")

    return CardiacReport(
        n_frames=total,
        ed_frame=ed_frame,
        es_frame=es_frame,
        ed_geometry=g_ed,
        es_geometry=g_es,
        edv=edv,
        esv=esv,
        sv=sv,
        ef_pct=float(ef),
        ef_pct_eq2=ef2,
        ef_pct_eq3=ef3,
        fs=fs,
        hr_bpm=hr,
        co=co,
        volume_units=units,
        per_beat_ef=per_beat,
        warnings=tuple(notes),
    )


# --- CSV serialization --------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{value:.6g}"


def report_csv_row(video_id: str, report: CardiacReport) -> str:
    """One CSV data row matching REPORT_CSV_HEADER, 6 significant digits."""
    joined = ";".join(report.warnings).replace(",", ";")
    fields = [
        video_id.replace(",", "_"),
        _fmt(report.n_frames),
        _fmt(report.ed_frame),
        _fmt(report.es_frame),
        _fmt(report.ed_geometry.area),
        _fmt(report.es_geometry.area),
        _fmt(report.ed_geometry.long_axis),
        _fmt(report.ed_geometry.short_axis),
        _fmt(report.es_geometry.long_axis),
        _fmt(report.es_geometry.short_axis),
        _fmt(report.edv),
        _fmt(report.esv),
        _fmt(report.sv),
        _fmt(report.ef_pct_eq2),
        _fmt(report.ef_pct_eq3),
        _fmt(report.fs),
        _fmt(report.hr_bpm),
        _fmt(report.co),
        report.volume_units,
        joined,
    ]
    return ",".join(fields)


def write_report_csv(path, rows: Sequence[tuple[str, CardiacReport]]) -> None:
    """Write a report CSV: exact header plus one row per analyzed video."""
    lines = [REPORT_CSV_HEADER]
    lines.extend(report_csv_row(video_id, report) for video_id, report in rows)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
