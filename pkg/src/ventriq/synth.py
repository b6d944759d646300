"""Synthetic beating-heart generator.

Renders frame sequences of a pulsing solid ellipse whose geometry is known
in closed form, giving the pipeline an end-to-end oracle: the analytic
report says exactly what EF/FS/HR a run over the generated frames (or their
noise-free truth masks) must reproduce.
"""

import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .cardiac import (
    CardiacReport,
    cardiac_output,
    ejection_fraction,
    fractional_shortening,
    stroke_volume,
    volume_spheroid,
    write_report_csv,
)
from .errors import IoFailureError, SpecInvalidError
from .imaging import VentricleGeometry, save_binary_mask, save_gray_image


@dataclass(frozen=True)
class SynthHeartSpec:
    """Parameters of the rendered pulsing ellipse.

    Axes interpolate sinusoidally between the end-diastolic values (phase 0)
    and the end-systolic ones (phase pi). The defaults produce a healthy
    ejection fraction of 52.1875%.
    """

    width: int = 512
    height: int = 480
    dl_ed: float = 200.0
    ds_ed: float = 120.0
    dl_es: float = 170.0
    ds_es: float = 90.0
    period_frames: int = 50
    n_cycles: int = 4
    orientation_deg: float = 0.0
    center_x: float = 256.0
    center_y: float = 240.0
    fg_intensity: int = 200
    bg_intensity: int = 30
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise SpecInvalidError("frame dimensions must be positive")
        if not (self.dl_ed >= self.ds_ed > 0):
            raise SpecInvalidError("ED axes must satisfy dl_ed >= ds_ed > 0")
        if not (self.dl_es >= self.ds_es > 0):
            raise SpecInvalidError("ES axes must satisfy dl_es >= ds_es > 0")
        if self.dl_es > self.dl_ed or self.ds_es > self.ds_ed:
            raise SpecInvalidError("ES axes cannot exceed ED axes")
        if self.period_frames < 4:
            raise SpecInvalidError("period_frames must be >= 4")
        if self.n_cycles < 1:
            raise SpecInvalidError("n_cycles must be >= 1")
        for name in ("fg_intensity", "bg_intensity"):
            v = getattr(self, name)
            if not 0 <= v <= 255:
                raise SpecInvalidError(f"{name} must be in [0, 255], got {v}")
        if self.noise_sigma < 0:
            raise SpecInvalidError("noise_sigma must be >= 0")
        # the ellipse must fit inside the frame at full diastole
        theta = math.radians(self.orientation_deg)
        a, b = self.dl_ed / 2.0, self.ds_ed / 2.0
        ext_x = math.hypot(a * math.cos(theta), b * math.sin(theta))
        ext_y = math.hypot(a * math.sin(theta), b * math.cos(theta))
        if (
            self.center_x - ext_x < 0
            or self.center_x + ext_x > self.width - 1
            or self.center_y - ext_y < 0
            or self.center_y + ext_y > self.height - 1
        ):
            raise SpecInvalidError("ED ellipse does not fit inside the frame")

    @property
    def n_frames(self) -> int:
        return self.period_frames * self.n_cycles

    def axes_at(self, t: int) -> tuple[float, float]:
        """Axis lengths at frame t: mid + half_range * cos(2 pi t / period)."""
        phase = 2.0 * math.pi * (t % self.period_frames) / self.period_frames
        c = math.cos(phase)
        dl = (self.dl_ed + self.dl_es) / 2.0 + (self.dl_ed - self.dl_es) / 2.0 * c
        ds = (self.ds_ed + self.ds_es) / 2.0 + (self.ds_ed - self.ds_es) / 2.0 * c
        return dl, ds


def rasterize_ellipse(
    width: int,
    height: int,
    cx: float,
    cy: float,
    dl: float,
    ds: float,
    orientation_deg: float,
) -> np.ndarray:
    """Boolean mask of a solid rotated ellipse by center-of-pixel inclusion."""
    theta = math.radians(orientation_deg)
    y, x = np.mgrid[0:height, 0:width]
    dx = x - cx
    dy = y - cy
    u = dx * math.cos(theta) + dy * math.sin(theta)
    v = -dx * math.sin(theta) + dy * math.cos(theta)
    return (u / (dl / 2.0)) ** 2 + (v / (ds / 2.0)) ** 2 <= 1.0


def truth_mask(spec: SynthHeartSpec, t: int) -> np.ndarray:
    """Noise-free ventricle mask at frame t."""
    dl, ds = spec.axes_at(t)
    return rasterize_ellipse(
        spec.width, spec.height, spec.center_x, spec.center_y, dl, ds, spec.orientation_deg
    )


def _frame_from_mask(spec: SynthHeartSpec, mask: np.ndarray, t: int) -> np.ndarray:
    frame = np.where(mask, spec.fg_intensity, spec.bg_intensity).astype(np.uint8)
    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.seed ^ t)
        noisy = frame + rng.normal(0.0, spec.noise_sigma, size=frame.shape)
        frame = np.clip(np.rint(noisy), 0, 255).astype(np.uint8)
    return frame


def render_frame(spec: SynthHeartSpec, t: int) -> np.ndarray:
    """Grayscale frame at t; noise is seeded per frame (seed xor t) so frames
    can render in any order and still come out identical."""
    return _frame_from_mask(spec, truth_mask(spec, t), t)


def analytic_report(spec: SynthHeartSpec, fps: float) -> CardiacReport:
    """Closed-form report the pipeline should reproduce on this sequence."""
    edv = volume_spheroid(spec.dl_ed, spec.ds_ed)
    esv = volume_spheroid(spec.dl_es, spec.ds_es)
    ef = ejection_fraction(edv, esv)
    sv = stroke_volume(edv, esv)
    fs = fractional_shortening(spec.dl_ed, spec.dl_es)
    hr = 60.0 * fps / spec.period_frames
    co = cardiac_output(sv, hr) if sv > 0 else 0.0
    ed_geom = VentricleGeometry(
        area=math.pi / 4.0 * spec.dl_ed * spec.ds_ed,
        long_axis=spec.dl_ed,
        short_axis=spec.ds_ed,
        centroid=(spec.center_x, spec.center_y),
    )
    es_geom = VentricleGeometry(
        area=math.pi / 4.0 * spec.dl_es * spec.ds_es,
        long_axis=spec.dl_es,
        short_axis=spec.ds_es,
        centroid=(spec.center_x, spec.center_y),
    )
    return CardiacReport(
        n_frames=spec.n_frames,
        ed_frame=0,
        es_frame=spec.period_frames // 2,
        ed_geometry=ed_geom,
        es_geometry=es_geom,
        edv=edv,
        esv=esv,
        sv=sv,
        ef_pct=ef,
        ef_pct_eq2=ef,
        ef_pct_eq3=ef,  # exact for a true ellipse: A = pi/4 * D_L * D_S
        fs=fs,
        hr_bpm=hr,
        co=co,
        volume_units="px3",
        per_beat_ef=None,
        warnings=("uncalibrated; volumes in px^3", "analytic closed-form values"),
    )


def generate_sequence(spec: SynthHeartSpec, fps: float, out_dir) -> int:
    """Write frames, noise-free truth masks and the analytic expected report.

    Layout: out_dir/frames/NNNN.png, out_dir/truth/NNNN.png,
    out_dir/expected.csv. Returns the number of frames written.
    """
    out_dir = Path(out_dir)
    frames_dir = out_dir / "frames"
    truth_dir = out_dir / "truth"
    try:
        frames_dir.mkdir(parents=True, exist_ok=True)
        truth_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailureError(f"cannot create {out_dir}: {exc}") from exc

    n = spec.n_frames
    digits = max(4, len(str(n - 1)))
    # axes repeat with the cycle, so rasterize each phase only once
    phase_masks = [truth_mask(spec, p) for p in range(spec.period_frames)]
    try:
        for t in range(n):
            name = f"{t:0{digits}d}.png"
            mask = phase_masks[t % spec.period_frames]
            save_gray_image(frames_dir / name, _frame_from_mask(spec, mask, t))
            save_binary_mask(truth_dir / name, mask)
        write_report_csv(
            out_dir / "expected.csv", [(out_dir.name, analytic_report(spec, fps))]
        )
    except OSError as exc:
        raise IoFailureError(f"write failed under {out_dir}: {exc}") from exc
    return n


_INT_FIELDS = {
    "width",
    "height",
    "period_frames",
    "n_cycles",
    "fg_intensity",
    "bg_intensity",
    "seed",
}


def parse_spec_file(path) -> SynthHeartSpec:
    """Parse a flat `key = value` spec file; '#' starts a comment.

    Keys are the SynthHeartSpec field names; unknown keys are rejected.
    """
    known = {f.name for f in fields(SynthHeartSpec)}
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecInvalidError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in known:
            raise SpecInvalidError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = int(value) if key in _INT_FIELDS else float(value)
        except ValueError as exc:
            raise SpecInvalidError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return SynthHeartSpec(**values)


def write_spec_file(path, spec: SynthHeartSpec) -> None:
    """Serialize a spec as the flat `key = value` format parse_spec_file reads."""
    lines = [f"{f.name} = {getattr(spec, f.name)}" for f in fields(SynthHeartSpec)]
    Path(path).write_text("\n".join(lines) + "\n")
