import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ventriq.cardiac import (
    AreaSeries,
    BeatMarkers,
    CalibrationConfig,
    REPORT_CSV_HEADER,
    build_report,
    cardiac_output,
    detect_beats,
    ejection_fraction,
    fractional_shortening,
    heart_rate,
    moving_average,
    report_csv_row,
    stroke_volume,
    volume_area,
    volume_spheroid,
)
from ventriq.errors import (
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
from ventriq.imaging import VentricleGeometry

# healthy reference cycle: ED axes 200/120, ES axes 170/90, period 50, 4 cycles
S1_EF = 52.1875
S1_FS = 0.15


def s1_geometries(n_frames=200, period=50):
    """Analytic geometry sequence for the reference cycle (no rasterization)."""
    geoms = []
    for t in range(n_frames):
        c = math.cos(2.0 * math.pi * (t % period) / period)
        dl = 185.0 + 15.0 * c
        ds = 105.0 + 15.0 * c
        geoms.append(
            VentricleGeometry(
                area=math.pi / 4.0 * dl * ds,
                long_axis=dl,
                short_axis=ds,
                centroid=(0.0, 0.0),
            )
        )
    return geoms


# --- scalar formulas -----------------------------------------------------------


def test_fs_basic():
    assert fractional_shortening(100, 60) == pytest.approx(0.4)
    assert fractional_shortening(100, 100) == 0.0


def test_fs_zero_systole_warns():
    with pytest.warns(UserWarning):
        assert fractional_shortening(50, 0) == 1.0


def test_fs_errors():
    with pytest.raises(NonPositiveDiastolicDiameterError):
        fractional_shortening(0, 0)
    with pytest.raises(SystolicExceedsDiastolicError):
        fractional_shortening(50, 60)


def test_volume_spheroid_values():
    assert volume_spheroid(2, 1) == pytest.approx(math.pi / 3)
    assert volume_spheroid(1, 1) == pytest.approx(math.pi / 6)
    assert volume_spheroid(200, 120) == pytest.approx(480000 * math.pi)


def test_volume_spheroid_errors():
    with pytest.raises(NonPositiveAxisError):
        volume_spheroid(0, 0)
    with pytest.raises(AxisOrderViolationError):
        volume_spheroid(1, 2)


def test_volume_area_values():
    assert volume_area(math.pi / 4 * 2 * 1, 2) == pytest.approx(math.pi / 3)
    assert volume_area(math.pi / 4, 1) == pytest.approx(math.pi / 6)
    assert volume_area(100, 20) == pytest.approx(80000 / (60 * math.pi))


def test_volume_area_errors():
    with pytest.raises(NonPositiveAreaError):
        volume_area(0, 10)
    with pytest.raises(NonPositiveAxisError):
        volume_area(10, 0)


@given(
    st.floats(min_value=1e-3, max_value=1e4),
    st.floats(min_value=1e-3, max_value=1.0),
)
@settings(max_examples=300, deadline=None)
def test_volume_formulas_agree_on_true_ellipse(d_l, ratio):
    """For the exact ellipse area pi/4*D_L*D_S both volume formulas coincide."""
    d_s = d_l * ratio
    ellipse_area = math.pi / 4.0 * d_l * d_s
    v_area = volume_area(ellipse_area, d_l)
    v_sph = volume_spheroid(d_l, d_s)
    assert abs(v_area - v_sph) <= 1e-12 * v_sph


def test_stroke_volume():
    assert stroke_volume(100, 40) == 60
    with pytest.warns(UserWarning):
        assert stroke_volume(5, 5) == 0
    with pytest.raises(NegativeStrokeVolumeError):
        stroke_volume(40, 100)


def test_ejection_fraction():
    assert ejection_fraction(100, 40) == pytest.approx(60.0)
    assert ejection_fraction(7, 7) == 0.0
    with pytest.raises(ZeroEDVError):
        ejection_fraction(0, 0)
    with pytest.raises(NegativeStrokeVolumeError):
        ejection_fraction(40, 100)


def test_cardiac_output():
    assert cardiac_output(0.2, 300) == pytest.approx(60.0)
    with pytest.warns(UserWarning):
        assert cardiac_output(0.0, 300) == 0.0
    with pytest.raises(MissingHeartRateError):
        cardiac_output(1.0, None)


@given(st.floats(min_value=0.01, max_value=100.0))
@settings(max_examples=100, deadline=None)
def test_scale_invariance(k):
    """EF and FS ignore uniform length scaling; volumes scale with k^3."""
    dl_ed, ds_ed, dl_es, ds_es = 200.0, 120.0, 170.0, 90.0
    ef = ejection_fraction(volume_spheroid(dl_ed, ds_ed), volume_spheroid(dl_es, ds_es))
    ef_k = ejection_fraction(
        volume_spheroid(k * dl_ed, k * ds_ed), volume_spheroid(k * dl_es, k * ds_es)
    )
    assert ef_k == pytest.approx(ef, rel=1e-9)
    fs = fractional_shortening(dl_ed, dl_es)
    assert fractional_shortening(k * dl_ed, k * dl_es) == pytest.approx(fs, rel=1e-9)
    sv = stroke_volume(volume_spheroid(dl_ed, ds_ed), volume_spheroid(dl_es, ds_es))
    sv_k = stroke_volume(
        volume_spheroid(k * dl_ed, k * ds_ed), volume_spheroid(k * dl_es, k * ds_es)
    )
    assert sv_k == pytest.approx(k**3 * sv, rel=1e-9)


# --- smoothing and beat detection --------------------------------------------------


def test_moving_average_shrinks_at_edges():
    out = moving_average(np.array([1.0, 2.0, 3.0, 4.0, 5.0]), 3)
    assert out == pytest.approx([1.0, 2.0, 3.0, 4.0, 5.0])
    out = moving_average(np.array([0.0, 3.0, 0.0, 3.0]), 3)
    assert out == pytest.approx([0.0, 1.0, 2.0, 3.0])


def test_detect_beats_sinusoid():
    """Sinusoid with period 50 and an off-grid phase: maxima at 7 + 50k.

    Expected marker positions derived from the closed form
    (pi/2 - 0.7) * period / (2 pi) + period * k before freezing.
    """
    t = np.arange(200)
    areas = 1000.0 * (1.0 + 0.2 * np.sin(2.0 * np.pi * t / 50 + 0.7))
    markers = detect_beats(AreaSeries(areas, fps=250.0), CalibrationConfig())
    assert len(markers.ed_frames) == 4
    assert list(np.diff(markers.ed_frames)) == [50, 50, 50]
    for got, expected in zip(markers.ed_frames, (7, 57, 107, 157)):
        assert abs(got - expected) <= 1
    assert len(markers.es_frames) == 4
    for got, expected in zip(markers.es_frames, (32, 82, 132, 182)):
        assert abs(got - expected) <= 1
    assert markers.global_ed == markers.ed_frames[0]
    assert markers.global_es == markers.es_frames[0]


def test_detect_beats_monotone_reports_globals():
    areas = np.linspace(10.0, 20.0, 30)
    with pytest.raises(NoCompleteBeatError) as err:
        detect_beats(AreaSeries(areas), CalibrationConfig())
    markers = err.value.markers
    assert markers.global_ed == 29
    assert markers.global_es == 0
    assert markers.ed_frames == ()
    assert markers.es_frames == ()


def test_detect_beats_constant_series():
    areas = np.full(20, 5.0)
    with pytest.raises(ConstantSeriesError):
        detect_beats(AreaSeries(areas), CalibrationConfig())


def test_detect_beats_too_short():
    with pytest.raises(SeriesTooShortError):
        detect_beats(AreaSeries(np.array([1.0, 2.0])), CalibrationConfig())


def test_detect_beats_global_tie_goes_to_first():
    # three exactly equal peaks at 1, 4, 7; equal minima elsewhere
    areas = np.array([1.0, 5.0, 1.0, 1.0, 5.0, 1.0, 1.0, 5.0, 1.0])
    markers = detect_beats(AreaSeries(areas), CalibrationConfig(smoothing_window=1))
    assert markers.ed_frames == (1, 4, 7)
    assert markers.global_ed == 1  # first of the tied maxima
    assert markers.global_es == 0  # first of the tied minima


def test_detect_beats_respects_frame_index_gaps():
    t = np.arange(200)
    areas = 1000.0 * (1.0 + 0.2 * np.sin(2.0 * np.pi * t / 50 + 0.7))
    keep = np.ones(200, dtype=bool)
    keep[3] = keep[120] = False  # drop two frames; markers shift to raw indices
    series = AreaSeries(areas[keep], fps=250.0, frame_indices=t[keep])
    markers = detect_beats(series, CalibrationConfig())
    assert 7 in markers.ed_frames
    assert 157 in markers.ed_frames


def test_heart_rate_values():
    markers = BeatMarkers((0, 50, 100, 150), (), 0, 25)
    assert heart_rate(markers, 250.0) == pytest.approx(300.0)
    markers = BeatMarkers((0, 125), (), 0, 60)
    assert heart_rate(markers, 250.0) == pytest.approx(120.0)


def test_heart_rate_insufficient():
    with pytest.raises(InsufficientBeatsError):
        heart_rate(BeatMarkers((10,), (), 10, 0), 250.0)


def test_heart_rate_times_period_identity():
    markers = BeatMarkers((3, 52, 103, 149), (), 3, 20)
    fps = 250.0
    hr = heart_rate(markers, fps)
    mean_period = float(np.mean(np.diff(markers.ed_frames)))
    assert hr * mean_period == pytest.approx(60.0 * fps)


# --- report assembly ------------------------------------------------------------------


def test_build_report_reference_cycle():
    report = build_report(s1_geometries(), CalibrationConfig(fps=250.0))
    assert report.ed_frame == 0
    assert report.es_frame == 25
    assert report.ef_pct == pytest.approx(S1_EF, abs=1e-9)
    assert report.ef_pct_eq2 == pytest.approx(S1_EF, abs=1e-9)
    assert report.ef_pct_eq3 == pytest.approx(S1_EF, abs=1e-9)
    assert report.fs == pytest.approx(S1_FS, abs=1e-12)
    assert report.hr_bpm == pytest.approx(300.0)
    assert report.edv == pytest.approx(480000 * math.pi)
    assert report.co == pytest.approx(report.sv * 300.0)
    assert report.volume_units == "px3"
    assert any("uncalibrated" in w for w in report.warnings)
    # cross-field consistency
    assert report.ef_pct == pytest.approx(100.0 * report.sv / report.edv, abs=1e-9)
    # per-beat EF from interior beats matches the global value here
    assert report.per_beat_ef is not None
    for ef in report.per_beat_ef:
        assert ef == pytest.approx(S1_EF, abs=1e-9)


def test_build_report_calibrated_units():
    um_per_px = 2.5
    report = build_report(
        s1_geometries(), CalibrationConfig(fps=250.0, microns_per_pixel=um_per_px)
    )
    assert report.volume_units == "nL"
    assert report.edv == pytest.approx(480000 * math.pi * um_per_px**3 / 1e6)
    assert report.ef_pct == pytest.approx(S1_EF, abs=1e-9)  # units cancel
    assert not any("uncalibrated" in w for w in report.warnings)


def test_build_report_constant_masks():
    geom = VentricleGeometry(area=100.0, long_axis=20.0, short_axis=10.0, centroid=(0, 0))
    report = build_report([geom] * 12, CalibrationConfig())
    assert report.ef_pct == 0.0
    assert report.fs == 0.0
    assert report.hr_bpm is None
    assert any("constant" in w for w in report.warnings)
    assert any("zero stroke volume" in w for w in report.warnings)


def test_build_report_two_frames_no_hr():
    g_big = VentricleGeometry(area=200.0, long_axis=30.0, short_axis=15.0, centroid=(0, 0))
    g_small = VentricleGeometry(area=100.0, long_axis=20.0, short_axis=10.0, centroid=(0, 0))
    report = build_report([g_big, g_small], CalibrationConfig())
    assert report.ed_frame == 0
    assert report.es_frame == 1
    assert report.hr_bpm is None
    assert report.co is None
    assert any("too short" in w for w in report.warnings)


def test_build_report_excludes_empty_frames_with_warning():
    geoms = s1_geometries()
    geoms[5] = None
    geoms[17] = None
    report = build_report(geoms, CalibrationConfig())
    assert report.n_frames == 200
    assert any(w.startswith("excluded 2 empty frames: 5 17") for w in report.warnings)
    assert report.ef_pct == pytest.approx(S1_EF, abs=1e-6)


def test_build_report_too_many_empty_frames():
    geoms = s1_geometries(n_frames=20, period=10)
    for i in range(5):  # 25% > 20%
        geoms[i] = None
    with pytest.raises(TooManyEmptyFramesError):
        build_report(geoms, CalibrationConfig())


def test_build_report_no_valid_frames():
    with pytest.raises(NoValidFramesError):
        build_report([None, None, None], CalibrationConfig())


def test_build_report_single_method_columns():
    geoms = s1_geometries()
    r2 = build_report(geoms, CalibrationConfig(volume_method="spheroid_eq2"))
    assert r2.ef_pct_eq2 is not None
    assert r2.ef_pct_eq3 is None
    r3 = build_report(geoms, CalibrationConfig(volume_method="area_eq3"))
    assert r3.ef_pct_eq2 is None
    assert r3.ef_pct_eq3 == pytest.approx(S1_EF, abs=1e-9)
    assert r3.ef_pct == r3.ef_pct_eq3


def test_build_report_short_fs_axis():
    report = build_report(s1_geometries(), CalibrationConfig(fs_axis="short"))
    assert report.fs == pytest.approx((120.0 - 90.0) / 120.0, abs=1e-12)


# --- CSV row ---------------------------------------------------------------------------


def test_csv_header_exact():
    assert REPORT_CSV_HEADER == (
        "video_id,n_frames,ed_frame,es_frame,ed_area_px,es_area_px,"
        "dl_ed_px,ds_ed_px,dl_es_px,ds_es_px,edv,esv,sv,"
        "ef_pct_eq2,ef_pct_eq3,fs,hr_bpm,co,volume_units,warnings"
    )


def test_csv_row_fields_and_missing_values():
    g_big = VentricleGeometry(area=200.0, long_axis=30.0, short_axis=15.0, centroid=(0, 0))
    g_small = VentricleGeometry(area=100.0, long_axis=20.0, short_axis=10.0, centroid=(0, 0))
    report = build_report([g_big, g_small], CalibrationConfig())
    row = report_csv_row("vid1", report).split(",")
    header_fields = REPORT_CSV_HEADER.split(",")
    assert len(row) == len(header_fields)
    assert row[0] == "vid1"
    assert row[header_fields.index("n_frames")] == "2"
    assert row[header_fields.index("hr_bpm")] == ""  # missing optional -> empty
    assert row[header_fields.index("co")] == ""
    assert row[header_fields.index("volume_units")] == "px3"


def test_csv_row_six_significant_digits():
    report = build_report(s1_geometries(), CalibrationConfig())
    row = report_csv_row("v", report).split(",")
    header_fields = REPORT_CSV_HEADER.split(",")
    assert row[header_fields.index("edv")] == "1.50796e+06"
    assert row[header_fields.index("ef_pct_eq2")] == "52.1875"
    assert row[header_fields.index("fs")] == "0.15"
