import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import write_mask
from ventriq.errors import DimensionMismatchError, EmptyListError, EmptySetError, PairCountMismatchError
from ventriq.imaging import flip
from ventriq.metrics import (
    dice,
    ef_error_report,
    evaluate_set,
    iou,
    write_ef_error_csv,
    write_eval_csv,
)


def half_overlap_pair():
    """|a| = |b| = 4 with overlap 2: dice 0.5, iou 1/3."""
    a = np.zeros((4, 4), dtype=bool)
    b = np.zeros((4, 4), dtype=bool)
    a[0, 0:4] = True
    b[0, 2:4] = True
    b[1, 0:2] = True
    return a, b


def test_identical_masks_score_one(rng):
    a = rng.random((8, 8)) < 0.4
    assert dice(a, a) == 1.0
    assert iou(a, a) == 1.0


def test_disjoint_masks_score_zero():
    a = np.zeros((4, 4), dtype=bool)
    b = np.zeros((4, 4), dtype=bool)
    a[0, :] = True
    b[2, :] = True
    assert dice(a, b) == 0.0
    assert iou(a, b) == 0.0


def test_half_overlap_fixture():
    a, b = half_overlap_pair()
    assert dice(a, b) == pytest.approx(0.5)
    assert iou(a, b) == pytest.approx(1.0 / 3.0)


def test_both_empty_score_one_with_warning():
    a = np.zeros((3, 3), dtype=bool)
    with pytest.warns(UserWarning):
        assert dice(a, a.copy()) == 1.0
    with pytest.warns(UserWarning):
        assert iou(a, a.copy()) == 1.0


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        dice(np.zeros((2, 2), dtype=bool), np.zeros((3, 3), dtype=bool))


@given(st.integers(0, 100_000))
@settings(max_examples=150, deadline=None)
def test_dice_iou_identity_symmetry_range(seed):
    """dice = 2*iou / (1 + iou) for every same-shape pair; both symmetric,
    both in [0, 1], dice >= iou."""
    rng = np.random.default_rng(seed)
    shape = tuple(rng.integers(1, 20, size=2))
    a = rng.random(shape) < rng.uniform(0, 1)
    b = rng.random(shape) < rng.uniform(0, 1)
    if not a.any() and not b.any():
        a[0, 0] = True
    d = dice(a, b)
    j = iou(a, b)
    assert 0.0 <= j <= d <= 1.0
    assert abs(d - 2.0 * j / (1.0 + j)) <= 1e-12
    assert dice(b, a) == d
    assert iou(b, a) == j


@pytest.mark.parametrize("axis", ["horizontal", "vertical", "both"])
def test_metrics_flip_invariant(axis, rng):
    a = rng.random((10, 12)) < 0.5
    b = rng.random((10, 12)) < 0.5
    assert dice(flip(a, axis), flip(b, axis)) == dice(a, b)
    assert iou(flip(a, axis), flip(b, axis)) == iou(a, b)


# --- evaluate_set --------------------------------------------------------------


def test_evaluate_identical_dirs(tmp_path, rng):
    pred = tmp_path / "pred"
    truth = tmp_path / "truth"
    pred.mkdir()
    truth.mkdir()
    for i in range(3):
        m = rng.random((6, 6)) < 0.5
        write_mask(pred / f"{i}.png", m)
        write_mask(truth / f"{i}.png", m)
    results, mean_dice, mean_iou = evaluate_set(pred, truth)
    assert len(results) == 3
    assert mean_dice == 1.0
    assert mean_iou == 1.0


def test_evaluate_mean_aggregation(tmp_path):
    pred = tmp_path / "pred"
    truth = tmp_path / "truth"
    pred.mkdir()
    truth.mkdir()
    full = np.ones((4, 4), dtype=bool)
    half = np.zeros((4, 4), dtype=bool)
    half[:2, :] = True
    write_mask(pred / "0.png", full)
    write_mask(truth / "0.png", full)  # iou 1.0
    write_mask(pred / "1.png", half)
    write_mask(truth / "1.png", full)  # iou 0.5
    results, mean_dice, mean_iou = evaluate_set(pred, truth)
    assert [r.iou for r in results] == pytest.approx([1.0, 0.5])
    assert mean_iou == pytest.approx(0.75)


def test_evaluate_empty_dirs(tmp_path):
    (tmp_path / "pred").mkdir()
    (tmp_path / "truth").mkdir()
    with pytest.raises(EmptySetError):
        evaluate_set(tmp_path / "pred", tmp_path / "truth")


def test_evaluate_count_mismatch(tmp_path, rng):
    pred = tmp_path / "pred"
    truth = tmp_path / "truth"
    pred.mkdir()
    truth.mkdir()
    write_mask(pred / "0.png", np.ones((3, 3), dtype=bool))
    write_mask(truth / "0.png", np.ones((3, 3), dtype=bool))
    write_mask(truth / "1.png", np.ones((3, 3), dtype=bool))
    with pytest.raises(PairCountMismatchError):
        evaluate_set(pred, truth)
    assert isinstance(EmptySetError("x"), PairCountMismatchError)


def test_evaluate_pair_dimension_mismatch(tmp_path):
    pred = tmp_path / "pred"
    truth = tmp_path / "truth"
    pred.mkdir()
    truth.mkdir()
    write_mask(pred / "0.png", np.ones((3, 3), dtype=bool))
    write_mask(truth / "0.png", np.ones((4, 4), dtype=bool))
    with pytest.raises(DimensionMismatchError):
        evaluate_set(pred, truth)


# --- ef_error_report --------------------------------------------------------------


def test_ef_error_aggregation():
    report = ef_error_report(
        [("v1", 51.0, 50.0), ("v2", 48.0, 50.0), ("v3", 53.0, 50.0), ("v4", 52.0, 50.0)]
    )
    assert [row[3] for row in report.per_video] == pytest.approx([1.0, 2.0, 3.0, 2.0])
    assert report.cumulative_abs_error == pytest.approx(8.0)
    assert report.mean_abs_error == pytest.approx(2.0)


def test_ef_error_single_exact_entry():
    report = ef_error_report([("v1", 60.0, 60.0)])
    assert report.cumulative_abs_error == 0.0
    assert report.mean_abs_error == 0.0


def test_ef_error_empty():
    with pytest.raises(EmptyListError):
        ef_error_report([])


# --- CSV writers -----------------------------------------------------------------


def test_eval_csv_layout(tmp_path, rng):
    pred = tmp_path / "pred"
    truth = tmp_path / "truth"
    pred.mkdir()
    truth.mkdir()
    m = rng.random((5, 5)) < 0.5
    write_mask(pred / "0.png", m)
    write_mask(truth / "0.png", m)
    results, mean_dice, mean_iou = evaluate_set(pred, truth)
    out = tmp_path / "metrics.csv"
    write_eval_csv(out, results, mean_dice, mean_iou)
    lines = out.read_text().splitlines()
    assert lines[0] == "pair_id,dice,iou"
    assert lines[-1] == "MEAN,1,1"


def test_ef_error_csv_layout(tmp_path):
    report = ef_error_report([("v1", 54.0, 52.19)])
    out = tmp_path / "ef.csv"
    write_ef_error_csv(out, report)
    lines = out.read_text().splitlines()
    assert lines[0] == "video_id,predicted_ef,manual_ef,abs_error"
    assert lines[1] == "v1,54,52.19,1.81"
    assert lines[2] == "CUMULATIVE,,,1.81"
    assert lines[3] == "MEAN,,,1.81"
