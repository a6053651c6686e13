import numpy as np
import pytest

from strokeloc import evalkit
from strokeloc.errors import (
    ConsistencyError,
    InvalidToleranceError,
    UndefinedMeanError,
)

from oracles import interval_iou, video_tiou_loop


def seg_set(vid, pairs):
    return evalkit.SegmentSet(vid, pairs)


def random_segments(rng, max_n=4, span=200):
    out = []
    for _ in range(int(rng.integers(0, max_n + 1))):
        s = int(rng.integers(0, span))
        e = s + int(rng.integers(0, 40))
        out.append((s, e))
    return out


# --- cut evaluation --------------------------------------------------------

def test_eval_cuts_identity():
    r = evalkit.eval_cuts([10, 50, 90], [10, 50, 90], 0)
    assert (r.precision, r.recall, r.f_score) == (1.0, 1.0, 1.0)
    assert r.matched == 3 and r.insertions == 0 and r.deletions == 0


def test_eval_cuts_extra_prediction():
    r = evalkit.eval_cuts([10, 50], [10], 0)
    assert r.matched == 1
    assert r.insertions == 1
    assert r.deletions == 0
    assert r.precision == 0.5
    assert r.recall == 1.0
    assert r.f_score == pytest.approx(2 / 3)


def test_eval_cuts_window_match():
    r = evalkit.eval_cuts([9], [10], 1)
    assert (r.precision, r.recall, r.f_score) == (1.0, 1.0, 1.0)
    miss = evalkit.eval_cuts([9], [10], 0)
    assert miss.matched == 0
    assert miss.f_score == 0.0


def test_eval_cuts_one_to_one():
    # one prediction cannot satisfy two ground-truth cuts
    r = evalkit.eval_cuts([10], [9, 11], 2)
    assert r.matched == 1
    assert r.deletions == 1
    assert r.insertions == 0


def test_eval_cuts_tie_goes_to_smaller_index():
    # both predictions are 1 away from gt 10; the earlier one is taken
    r = evalkit.eval_cuts([9, 11], [10, 11], 1)
    # gt 10 takes pred 9 (tie between 9 and 11, smaller index wins),
    # leaving pred 11 for gt 11
    assert r.matched == 2


def test_eval_cuts_negative_tolerance():
    with pytest.raises(InvalidToleranceError):
        evalkit.eval_cuts([1], [1], -1)


def test_eval_cuts_empty_sides():
    assert evalkit.eval_cuts([], [], 0).f_score == 0.0
    r = evalkit.eval_cuts([], [5], 0)
    assert r.deletions == 1 and r.precision == 0.0
    r = evalkit.eval_cuts([5], [], 0)
    assert r.insertions == 1 and r.recall == 0.0


def test_eval_cuts_count_conservation():
    rng = np.random.default_rng(19)
    for _ in range(100):
        pred = sorted(set(rng.integers(1, 100, size=rng.integers(0, 10)).tolist()))
        gt = sorted(set(rng.integers(1, 100, size=rng.integers(0, 10)).tolist()))
        tol = int(rng.integers(0, 4))
        r = evalkit.eval_cuts(pred, gt, tol)
        assert r.matched + r.deletions == len(gt)
        assert r.matched + r.insertions == len(pred)


def test_aggregate_cut_reports():
    r1 = evalkit.eval_cuts([10, 50], [10], 0)
    r2 = evalkit.eval_cuts([7], [7], 0)
    total = evalkit.aggregate_cut_reports([r1, r2])
    assert total.matched == 2
    assert total.insertions == 1
    assert total.precision == pytest.approx(2 / 3)
    assert total.recall == 1.0


# --- temporal IoU ----------------------------------------------------------

def test_segment_iou_fixtures():
    assert evalkit.segment_iou((3, 9), (3, 9)) == 1.0
    assert evalkit.segment_iou((0, 10), (20, 30)) == 0.0
    assert evalkit.segment_iou((0, 10), (5, 15)) == 0.375


def test_segment_iou_properties():
    rng = np.random.default_rng(23)
    for _ in range(300):
        a = tuple(sorted(rng.integers(0, 100, size=2).tolist()))
        b = tuple(sorted(rng.integers(0, 100, size=2).tolist()))
        v = evalkit.segment_iou(a, b)
        assert v == evalkit.segment_iou(b, a)
        assert 0.0 <= v <= 1.0
        assert (v == 1.0) == (a == b)
        assert v == interval_iou(a, b)


def test_video_tiou_fixtures():
    assert evalkit.video_tiou(seg_set("v", [(0, 10)]), seg_set("v", [(5, 15)])) == 0.375
    got = evalkit.video_tiou(
        seg_set("v", [(0, 9)]), seg_set("v", [(0, 9), (20, 29)]))
    assert got == 0.75
    same = seg_set("v", [(3, 8), (40, 60)])
    assert evalkit.video_tiou(same, same) == 1.0


def test_video_tiou_empty_conventions():
    assert evalkit.video_tiou(seg_set("v", []), seg_set("v", [])) == 1.0
    assert evalkit.video_tiou(seg_set("v", []), seg_set("v", [(0, 5)])) == 0.0
    assert evalkit.video_tiou(seg_set("v", [(0, 5)]), seg_set("v", [])) == 0.0


def test_video_tiou_id_mismatch():
    with pytest.raises(ConsistencyError):
        evalkit.video_tiou(seg_set("a", []), seg_set("b", []))


def test_video_tiou_matches_loop_oracle():
    rng = np.random.default_rng(29)
    for _ in range(300):
        pred = random_segments(rng)
        gt = random_segments(rng)
        got = evalkit.video_tiou(seg_set("v", pred), seg_set("v", gt))
        assert got == pytest.approx(video_tiou_loop(pred, gt), abs=1e-12)


def test_video_tiou_swap_symmetry_and_duplicates():
    rng = np.random.default_rng(31)
    for _ in range(100):
        pred = random_segments(rng)
        gt = random_segments(rng)
        a = evalkit.video_tiou(seg_set("v", pred), seg_set("v", gt))
        b = evalkit.video_tiou(seg_set("v", gt), seg_set("v", pred))
        assert a == pytest.approx(b, abs=1e-12)
        if pred:
            doubled = pred + [pred[0]]
            c = evalkit.video_tiou(seg_set("v", doubled), seg_set("v", gt))
            assert c == pytest.approx(a, abs=1e-12)


def test_weighted_mean_fixtures():
    assert evalkit.weighted_mean_tiou([(0.6, 4)]) == 0.6
    assert evalkit.weighted_mean_tiou([(0.5, 2), (1.0, 3)]) == pytest.approx(0.8)
    with pytest.raises(UndefinedMeanError):
        evalkit.weighted_mean_tiou([(0.5, 0), (1.0, 0)])


def test_weighted_mean_scale_invariance():
    rows = [(0.25, 1), (0.75, 2), (0.5, 3)]
    base = evalkit.weighted_mean_tiou(rows)
    for k in (2, 5, 11):
        scaled = [(t, n * k) for t, n in rows]
        assert evalkit.weighted_mean_tiou(scaled) == pytest.approx(base, abs=1e-15)


def test_build_tiou_report():
    preds = [seg_set("a", [(0, 9)]), seg_set("b", [(0, 4)])]
    gts = [seg_set("a", [(0, 9), (20, 29)]), seg_set("b", [(0, 4)])]
    report = evalkit.build_tiou_report(preds, gts)
    assert report.n_videos == 2
    assert report.per_video[0] == ("a", 0.75, 2)
    assert report.per_video[1] == ("b", 1.0, 1)
    assert report.weighted_mean == pytest.approx((0.75 * 2 + 1.0) / 3)


def test_build_tiou_report_missing_video():
    with pytest.raises(ConsistencyError):
        evalkit.build_tiou_report([], [seg_set("a", [(0, 1)])])
