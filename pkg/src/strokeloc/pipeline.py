"""End-to-end stroke localization: cut detection from a difference series,
camera-model dataset assembly, the shot state machine that turns camera
predictions into stroke segments, and min-length filtering with its T-sweep.

The state machine is a deliberate replay of the published extraction
procedure, including its quirks: a segment still open after the last cut is
dropped, and a stroke starting at frame 0 is unreachable because cut lists
never contain 0. Both behaviors can be toggled via LocalizeOptions but stay
off by default so the reference behavior is the default behavior.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import evalkit
from .errors import (
    ConsistencyError,
    InvalidConfigError,
    RangeError,
    ShapeError,
)
from .features import DiffSeries, HogParams, hog
from .ingest import FrameSource
from .learners import (
    LinearSvmModel,
    RandomForestModel,
    rf_predict_batch,
    svm_predict,
)

CUTS_FORMAT_VERSION = 1
SEGMENTS_FORMAT_VERSION = 1


@dataclass(frozen=True)
class CutList:
    """Predicted or annotated shot boundaries for one video.

    A cut at index c means frame c opens a new shot, so a boundary "between
    frames 137 and 138" is stored as 138. Index 0 is never a cut.
    """

    video_id: str
    n_frames: int
    cuts: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "cuts", tuple(int(c) for c in self.cuts))
        prev = 0
        for c in self.cuts:
            if c <= prev:
                raise ConsistencyError(
                    f"cuts must be strictly increasing and positive, got {self.cuts}")
            prev = c
        if self.cuts and self.cuts[-1] > self.n_frames - 1:
            raise RangeError(
                f"cut {self.cuts[-1]} out of range for {self.n_frames} frames")

    def __len__(self) -> int:
        return len(self.cuts)


@dataclass(frozen=True)
class Segment:
    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.end < self.start:
            raise ConsistencyError(f"invalid segment [{self.start}, {self.end}]")

    @property
    def length(self) -> int:
        """The filtering length d = end - start (not the inclusive count)."""
        return self.end - self.start


@dataclass(frozen=True)
class LocalizeOptions:
    first_k: int = 1
    min_votes: int = 1
    close_trailing: bool = False
    prepend_zero: bool = False

    def __post_init__(self) -> None:
        if not 1 <= self.min_votes <= self.first_k:
            raise InvalidConfigError(
                f"need 1 <= min_votes <= first_k, got "
                f"min_votes={self.min_votes}, first_k={self.first_k}")


def detect_cuts(series: DiffSeries, rf: RandomForestModel,
                feature_norm: float) -> CutList:
    """Classify each consecutive-frame difference; a positive at position i
    puts a cut at frame i+1. Differences are divided by feature_norm
    (normally the pixel count) so models transfer across resolutions."""
    if rf.n_features != 1:
        raise ShapeError(
            f"cut model must take a single scalar feature, has {rf.n_features}")
    if feature_norm <= 0:
        raise RangeError(f"feature_norm must be positive, got {feature_norm}")
    values = np.asarray(series.values, dtype=np.float64)
    n_frames = values.shape[0] + 1
    if values.shape[0] == 0:
        return CutList(video_id=series.video_id, n_frames=n_frames)
    labels, _ = rf_predict_batch(rf, (values / feature_norm).reshape(-1, 1))
    cuts = tuple(int(i) + 1 for i in np.flatnonzero(labels == 1))
    return CutList(video_id=series.video_id, n_frames=n_frames, cuts=cuts)


def build_cam_dataset(videos: Sequence[FrameSource],
                      cuts: Sequence[CutList],
                      positives: Mapping[str, Iterable[int]],
                      params: HogParams = HogParams()) -> tuple[np.ndarray, np.ndarray]:
    """HOG training set from shot first frames.

    Every cut in each video's list yields one sample; indices named in
    positives get label 1, the rest label 0. A positive may also be 0 to
    include the video's opening shot. Rows are ordered by (video_id, frame
    index) so the assembled dataset is reproducible.
    """
    cuts_by_id = {c.video_id: c for c in cuts}
    videos_by_id = {v.meta.video_id: v for v in videos}
    if set(cuts_by_id) != set(videos_by_id):
        raise ConsistencyError("videos and cut lists must cover the same ids")
    unknown = set(positives) - set(videos_by_id)
    if unknown:
        raise ConsistencyError(f"positives name unknown videos: {sorted(unknown)}")
    samples = []
    labels = []
    for vid in sorted(videos_by_id):
        cut_list = cuts_by_id[vid]
        pos = {int(i) for i in positives.get(vid, ())}
        stray = pos - set(cut_list.cuts) - {0}
        if stray:
            raise ConsistencyError(
                f"positive indices {sorted(stray)} are not cuts of {vid!r}")
        source = videos_by_id[vid]
        for index in sorted(set(cut_list.cuts) | pos):
            frame = source.read_frame(index)
            samples.append(hog(frame, params).values)
            labels.append(1 if index in pos else 0)
    if not samples:
        return np.zeros((0, 0), dtype=np.float64), np.zeros(0, dtype=np.int64)
    return np.stack(samples), np.asarray(labels, dtype=np.int64)


def run_shot_state_machine(cuts: Sequence[int], n_frames: int,
                           predict: Callable[[int], tuple[int, int]],
                           opts: LocalizeOptions = LocalizeOptions()) -> list[Segment]:
    """The extraction state machine, decoupled from any real video.

    predict(cut) returns the (cam1, cam2) decisions for the shot opening at
    that cut. Outside a segment, cam1 positive opens one at the cut. Inside,
    cam2 negative closes at cut-1 (cam1 positive reopens immediately); cam2
    positive closes at the next cut - 1, or the last frame when no cut
    remains. Unless close_trailing is set, a segment left open when the cuts
    run out is discarded.
    """
    positions = list(cuts)
    if opts.prepend_zero and (not positions or positions[0] != 0):
        positions.insert(0, 0)
    segments: list[Segment] = []
    start = -1
    for i, cut in enumerate(positions):
        if cut >= n_frames:
            raise RangeError(f"cut {cut} out of range for {n_frames} frames")
        cam1, cam2 = predict(cut)
        if start == -1:
            if cam1 == 1:
                start = cut
        else:
            if cam2 == 0:
                segments.append(Segment(start, cut - 1))
                start = cut if cam1 == 1 else -1
            else:
                end = positions[i + 1] - 1 if i + 1 < len(positions) else n_frames - 1
                segments.append(Segment(start, end))
                start = -1
    if opts.close_trailing and start != -1:
        segments.append(Segment(start, n_frames - 1))
    return segments


def localize_strokes(source: FrameSource, cuts: CutList,
                     cam1: LinearSvmModel, cam2: LinearSvmModel,
                     params: HogParams = HogParams(),
                     opts: LocalizeOptions = LocalizeOptions()) -> list[Segment]:
    """Run the state machine over a video using the two camera models.

    With first_k == 1 each decision comes from the HOG of the frame at the
    cut. With first_k > 1 a shot's decision becomes "at least min_votes
    positives among its first first_k frames" (frames past the shot or the
    video are not read).
    """
    n_frames = source.meta.n_frames
    positions = sorted(set(cuts.cuts) | ({0} if opts.prepend_zero else set()))
    next_boundary = {}
    for j, cut in enumerate(positions):
        next_boundary[cut] = positions[j + 1] if j + 1 < len(positions) else n_frames

    def predict(cut: int) -> tuple[int, int]:
        shot_end = min(cut + opts.first_k, next_boundary.get(cut, n_frames), n_frames)
        votes1 = votes2 = 0
        for index in range(cut, shot_end):
            descriptor = hog(source.read_frame(index), params).values
            votes1 += svm_predict(cam1, descriptor)
            votes2 += svm_predict(cam2, descriptor)
        return (1 if votes1 >= opts.min_votes else 0,
                1 if votes2 >= opts.min_votes else 0)

    segments = run_shot_state_machine(cuts.cuts, n_frames, predict, opts)
    # The state machine construction guarantees disjoint sorted output;
    # keep the guarantee checked since downstream scoring relies on it.
    for a, b in zip(segments, segments[1:]):
        if a.end >= b.start:
            raise ConsistencyError(f"overlapping segments {a} and {b}")
    return segments


def filter_segments(segments: Sequence[Segment], T: int) -> list[Segment]:
    """Drop segments shorter than T, with length measured as end - start."""
    if T < 0:
        raise RangeError(f"T must be >= 0, got {T}")
    return [s for s in segments if s.end - s.start >= T]


def sweep_filter(pred_by_video: Mapping[str, Sequence[Segment]],
                 gt_by_video: Mapping[str, Sequence[Segment]],
                 T_values: Sequence[int]) -> list[tuple[int, float]]:
    """Weighted mean TIoU after filtering at each T; the data behind the
    filter-length curve."""
    if len(T_values) == 0:
        raise InvalidConfigError("T_values must be non-empty")
    gt_sets = [evalkit.SegmentSet(vid, [(s.start, s.end) for s in segs])
               for vid, segs in sorted(gt_by_video.items())]
    rows = []
    for T in T_values:
        pred_sets = [
            evalkit.SegmentSet(
                vid, [(s.start, s.end) for s in filter_segments(list(segs), T)])
            for vid, segs in sorted(pred_by_video.items())
        ]
        report = evalkit.build_tiou_report(pred_sets, gt_sets)
        rows.append((int(T), report.weighted_mean))
    return rows


# --- file formats ----------------------------------------------------------

def cuts_to_json(cuts: CutList) -> str:
    doc = {
        "format_version": CUTS_FORMAT_VERSION,
        "video_id": cuts.video_id,
        "n_frames": cuts.n_frames,
        "cuts": list(cuts.cuts),
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def cuts_from_json(text: str) -> CutList:
    doc = json.loads(text)
    if doc.get("format_version") != CUTS_FORMAT_VERSION:
        raise ConsistencyError(
            f"unsupported cuts format_version {doc.get('format_version')!r}")
    return CutList(video_id=doc["video_id"], n_frames=int(doc["n_frames"]),
                   cuts=tuple(doc["cuts"]))


def segments_to_json(video_id: str, segments: Sequence[Segment], **extra) -> str:
    doc = {
        "format_version": SEGMENTS_FORMAT_VERSION,
        "video_id": video_id,
        "segments": [[s.start, s.end] for s in segments],
    }
    doc.update(extra)
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def segments_from_json(text: str) -> tuple[str, list[Segment]]:
    doc = json.loads(text)
    if doc.get("format_version") != SEGMENTS_FORMAT_VERSION:
        raise ConsistencyError(
            f"unsupported segments format_version {doc.get('format_version')!r}")
    return doc["video_id"], [Segment(int(s), int(e)) for s, e in doc["segments"]]
