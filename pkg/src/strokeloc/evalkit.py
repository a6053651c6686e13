"""Scoring for cut detection (precision/recall/F over insertions and
deletions) and temporal IoU of predicted stroke segments.

Segment arguments are (start, end) pairs with inclusive frame counting, so
len([x, y]) = y - x + 1. Cut arguments may be plain int sequences or any
object with a .cuts attribute.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    ConsistencyError,
    InvalidToleranceError,
    UndefinedMeanError,
)


def _as_segment(seg) -> tuple[int, int]:
    if hasattr(seg, "start"):
        start, end = int(seg.start), int(seg.end)
    else:
        start, end = int(seg[0]), int(seg[1])
    if start < 0 or end < start:
        raise ConsistencyError(f"invalid segment [{start}, {end}]")
    return start, end


def _as_cuts(obj) -> tuple[list[int], str | None]:
    if hasattr(obj, "cuts"):
        return [int(c) for c in obj.cuts], getattr(obj, "video_id", None)
    return [int(c) for c in obj], None


@dataclass(frozen=True)
class SegmentSet:
    video_id: str
    segments: tuple[tuple[int, int], ...]

    def __init__(self, video_id: str, segments: Iterable) -> None:
        object.__setattr__(self, "video_id", video_id)
        # true set semantics: duplicates collapse, order is canonical, so a
        # repeated segment can never move a mean
        object.__setattr__(self, "segments",
                           tuple(sorted({_as_segment(s) for s in segments})))

    def __len__(self) -> int:
        return len(self.segments)


@dataclass(frozen=True)
class CutEvalReport:
    matched: int
    insertions: int
    deletions: int
    precision: float
    recall: float
    f_score: float

    def as_dict(self) -> dict:
        return {
            "matched": self.matched, "insertions": self.insertions,
            "deletions": self.deletions, "precision": self.precision,
            "recall": self.recall, "f_score": self.f_score,
        }


@dataclass(frozen=True)
class TiouReport:
    per_video: tuple[tuple[str, float, int], ...]
    weighted_mean: float

    @property
    def n_videos(self) -> int:
        return len(self.per_video)

    def as_dict(self) -> dict:
        return {
            "per_video": [
                {"video_id": vid, "tiou": t, "n_gt": n}
                for vid, t, n in self.per_video
            ],
            "weighted_mean": self.weighted_mean,
            "n_videos": self.n_videos,
        }


def _prf(matched: int, insertions: int, deletions: int) -> CutEvalReport:
    precision = matched / (matched + insertions) if matched + insertions else 0.0
    recall = matched / (matched + deletions) if matched + deletions else 0.0
    f = (2 * precision * recall / (precision + recall)
         if precision + recall else 0.0)
    return CutEvalReport(matched, insertions, deletions, precision, recall, f)


def eval_cuts(pred, gt, tolerance: int = 0) -> CutEvalReport:
    """Match each ground-truth cut to the nearest unmatched prediction
    within +/- tolerance frames (ties go to the smaller index)."""
    if tolerance < 0:
        raise InvalidToleranceError(f"tolerance must be >= 0, got {tolerance}")
    pred_cuts, pred_vid = _as_cuts(pred)
    gt_cuts, gt_vid = _as_cuts(gt)
    if pred_vid is not None and gt_vid is not None and pred_vid != gt_vid:
        raise ConsistencyError(
            f"cut lists belong to different videos: {pred_vid!r} vs {gt_vid!r}")
    taken = [False] * len(pred_cuts)
    matched = 0
    for g in gt_cuts:
        best = None
        for j, p in enumerate(pred_cuts):
            if taken[j] or abs(p - g) > tolerance:
                continue
            if best is None or abs(p - g) < abs(pred_cuts[best] - g):
                best = j
        if best is not None:
            taken[best] = True
            matched += 1
    return _prf(matched, len(pred_cuts) - matched, len(gt_cuts) - matched)


def aggregate_cut_reports(reports: Sequence[CutEvalReport]) -> CutEvalReport:
    """Pool counts across videos, then recompute the rates."""
    matched = sum(r.matched for r in reports)
    insertions = sum(r.insertions for r in reports)
    deletions = sum(r.deletions for r in reports)
    return _prf(matched, insertions, deletions)


def segment_iou(a, b) -> float:
    a = _as_segment(a)
    b = _as_segment(b)
    inter = min(a[1], b[1]) - max(a[0], b[0]) + 1
    if inter <= 0:
        return 0.0
    union = (a[1] - a[0] + 1) + (b[1] - b[0] + 1) - inter
    return inter / union


def video_tiou(pred: SegmentSet, gt: SegmentSet) -> float:
    """Two-sided mean-of-best-overlaps for one video.

    Both sets empty scores 1.0 (a correct "no stroke" call); exactly one
    empty scores 0.0.
    """
    if pred.video_id != gt.video_id:
        raise ConsistencyError(
            f"segment sets belong to different videos: "
            f"{pred.video_id!r} vs {gt.video_id!r}")
    if not pred.segments and not gt.segments:
        return 1.0
    if not pred.segments or not gt.segments:
        return 0.0
    fwd = sum(max(segment_iou(p, g) for p in pred.segments)
              for g in gt.segments) / len(gt.segments)
    bwd = sum(max(segment_iou(p, g) for g in gt.segments)
              for p in pred.segments) / len(pred.segments)
    return 0.5 * (fwd + bwd)


def weighted_mean_tiou(per_video: Sequence[tuple[float, int]]) -> float:
    """Ground-truth-count weighted mean of per-video TIoU values."""
    total_n = sum(n for _, n in per_video)
    if total_n == 0:
        raise UndefinedMeanError(
            "weighted mean needs at least one video with ground-truth segments")
    return sum(t * n for t, n in per_video) / total_n


def build_tiou_report(preds: Iterable[SegmentSet],
                      gts: Iterable[SegmentSet]) -> TiouReport:
    """Pair SegmentSets by video_id (sorted), score each, take the
    weighted mean. Every ground-truth video must have a prediction set."""
    pred_by_id = {s.video_id: s for s in preds}
    gt_by_id = {s.video_id: s for s in gts}
    missing = sorted(set(gt_by_id) - set(pred_by_id))
    if missing:
        raise ConsistencyError(f"no predictions for videos: {', '.join(missing)}")
    rows = []
    for vid in sorted(gt_by_id):
        gt = gt_by_id[vid]
        rows.append((vid, video_tiou(pred_by_id[vid], gt), len(gt)))
    mean = weighted_mean_tiou([(t, n) for _, t, n in rows])
    return TiouReport(per_video=tuple(rows), weighted_mean=mean)
