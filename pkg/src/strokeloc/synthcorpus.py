"""Seeded synthetic video corpus with known cuts and stroke segments.

The real training and evaluation footage is not distributable, so the
acceptance path runs on generated material instead. Three shot classes mimic
the structure the pipeline cares about:

* class A ("bowler" camera): vertical sawtooth ramp plus a checker stamp,
  HOG energy concentrated in the vertical-gradient bin;
* class B ("follow" camera): horizontal sawtooth, energy in bin 0;
* class C (anything else): random elliptical blobs, mixed orientations.

Consecutive shots draw their pixel values from different 64-level intensity
windows separated by unused gaps, and noise is clipped to stay inside the
window. A histogram therefore never shares a bin with its neighbor shot's
histograms, which pins the summed absolute difference at a cut to exactly
2 * (pixels per frame), while intra-shot differences stay at the noise
fluctuation scale. Shots scroll cyclically frame to frame, so motion exists
but every frame of a shot keeps an identical histogram.

A stroke is an A shot, extended through the immediately following shot when
that shot is a B. The first shot of a video is never an A (the extraction
state machine cannot open a segment at frame 0) and a final A is demoted to
B for the same reason taken from the other side: a segment still open at the
end of the cut list would be dropped, so ground truth would become
unreachable. Perfect cut detection plus perfect camera decisions then
reproduce the ground truth exactly, which is what the acceptance suite
checks.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import InvalidConfigError
from .ingest import VideoMeta, write_gry
from .pipeline import CutList, Segment, cuts_to_json, segments_to_json

MANIFEST_FORMAT_VERSION = 1

CLASS_NAMES = ("A", "B", "C")

# three disjoint 64-level intensity windows with 32-level guard gaps
_WINDOW_STARTS = (0, 96, 192)
_WINDOW_WIDTH = 64

# sawtooth parameters: 7-row period, 8 levels per step, values in [lo+4, lo+52]
_TOOTH_PERIOD = 7
_TOOTH_STEP = 8
_RAMP_OFFSET = 4


@dataclass(frozen=True)
class CorpusSpec:
    n_videos: int = 20
    frames_per_video: int = 3000
    width: int = 64
    height: int = 64
    shot_len_range: tuple[int, int] = (40, 120)
    class_mix: tuple[float, float, float] = (0.35, 0.35, 0.30)
    noise_level: float = 1.5
    seed: int = 0

    def __post_init__(self) -> None:
        lo, hi = self.shot_len_range
        if lo < 2 or hi < lo:
            raise InvalidConfigError(
                f"shot_len_range must satisfy 2 <= min <= max, got {self.shot_len_range}")
        if self.n_videos < 0:
            raise InvalidConfigError("n_videos must be >= 0")
        if self.frames_per_video < lo:
            raise InvalidConfigError(
                "frames_per_video must fit at least one minimum-length shot")
        if self.width < 16 or self.height < 16:
            raise InvalidConfigError("frames must be at least 16x16 for HOG blocks")
        if len(self.class_mix) != 3 or min(self.class_mix) < 0 \
                or abs(sum(self.class_mix) - 1.0) > 1e-9:
            raise InvalidConfigError(
                f"class_mix must be three non-negative proportions summing to 1, "
                f"got {self.class_mix}")
        if self.noise_level < 0:
            raise InvalidConfigError("noise_level must be >= 0")


@dataclass(frozen=True)
class Shot:
    start: int
    length: int
    cls: str
    window: int
    base: np.ndarray = field(repr=False, compare=False)

    @property
    def end(self) -> int:
        return self.start + self.length - 1


@dataclass(frozen=True)
class SynthVideo:
    video_id: str
    meta: VideoMeta
    shots: tuple[Shot, ...]
    cuts: CutList
    segments: tuple[Segment, ...]
    spec: CorpusSpec
    video_index: int

    def frames(self) -> Iterator[np.ndarray]:
        """Stream the frames. Each call re-derives the noise generator, so
        two iterations produce byte-identical output."""
        noise_rng = np.random.default_rng([self.spec.seed, self.video_index, 1])
        sigma = self.spec.noise_level
        for shot in self.shots:
            lo = _WINDOW_STARTS[shot.window]
            hi = lo + _WINDOW_WIDTH - 1
            axis = 0 if shot.cls == "A" else 1
            for k in range(shot.length):
                if shot.cls == "C":
                    frame = shot.base.astype(np.float64)
                else:
                    frame = np.roll(shot.base, k % _TOOTH_PERIOD, axis=axis).astype(np.float64)
                if sigma > 0:
                    frame += noise_rng.normal(0.0, sigma, size=frame.shape)
                yield np.clip(np.rint(frame), lo, hi).astype(np.uint8)


def _sawtooth_base(h: int, w: int, lo: int, vertical: bool) -> np.ndarray:
    axis = np.arange(h if vertical else w)
    tooth = lo + _RAMP_OFFSET + _TOOTH_STEP * (axis % _TOOTH_PERIOD)
    if vertical:
        return np.broadcast_to(tooth[:, None], (h, w)).astype(np.float64).copy()
    return np.broadcast_to(tooth[None, :], (h, w)).astype(np.float64).copy()


def _checker_stamp(base: np.ndarray) -> None:
    # small +/-6 checkerboard near the top-left corner, 4x4 px cells,
    # clipped when the frame is too small to hold the full stamp
    y0, x0, size = 8, 8, 16
    h = min(size, base.shape[0] - y0)
    w = min(size, base.shape[1] - x0)
    if h <= 0 or w <= 0:
        return
    yy, xx = np.ogrid[0:h, 0:w]
    pattern = np.where(((yy // 4) + (xx // 4)) % 2 == 0, 6.0, -6.0)
    base[y0:y0 + h, x0:x0 + w] += pattern


def _blob_base(h: int, w: int, lo: int, rng: np.random.Generator) -> np.ndarray:
    base = np.full((h, w), float(lo + _WINDOW_WIDTH // 2), dtype=np.float64)
    yy, xx = np.ogrid[0:h, 0:w]
    for _ in range(int(rng.integers(3, 7))):
        cy = float(rng.uniform(0, h))
        cx = float(rng.uniform(0, w))
        ay = float(rng.uniform(3, 12))
        ax = float(rng.uniform(3, 12))
        value = lo + _RAMP_OFFSET + float(rng.uniform(0, _WINDOW_WIDTH - 2 * _RAMP_OFFSET - 8))
        mask = ((yy - cy) / ay) ** 2 + ((xx - cx) / ax) ** 2 <= 1.0
        base[mask] = value
    return base


def _draw_shot_lengths(spec: CorpusSpec, rng: np.random.Generator) -> list[int]:
    lo, hi = spec.shot_len_range
    lengths: list[int] = []
    total = 0
    while total < spec.frames_per_video:
        length = int(rng.integers(lo, hi + 1))
        if spec.frames_per_video - total - length < lo:
            length = spec.frames_per_video - total
        lengths.append(length)
        total += length
    return lengths


def _draw_classes(n_shots: int, spec: CorpusSpec, rng: np.random.Generator) -> list[str]:
    classes = [CLASS_NAMES[int(c)]
               for c in rng.choice(3, size=n_shots, p=list(spec.class_mix))]
    # frame-0 strokes are unreachable and trailing strokes would be dropped,
    # so the bookend shots must not be A (a final A becomes a B on purpose:
    # it exercises the close-at-last-frame branch after a preceding A)
    if classes[0] == "A":
        classes[0] = "C"
    if classes[-1] == "A":
        classes[-1] = "B"
    if n_shots >= 3 and "A" not in classes:
        classes[n_shots // 2] = "A"
    return classes


def _ground_truth(shots: tuple[Shot, ...]) -> tuple[Segment, ...]:
    segments = []
    for i, shot in enumerate(shots):
        if shot.cls != "A":
            continue
        follow = shots[i + 1] if i + 1 < len(shots) else None
        end = follow.end if follow is not None and follow.cls == "B" else shot.end
        segments.append(Segment(shot.start, end))
    return tuple(segments)


def generate_video(spec: CorpusSpec, video_index: int) -> SynthVideo:
    """Build the full deterministic recipe for one video.

    Everything structural (shot lengths, classes, windows, blob shapes)
    comes from a generator seeded with (seed, video_index, 0); frame noise
    has its own stream so SynthVideo.frames() is repeatable.
    """
    if video_index < 0 or video_index >= spec.n_videos:
        raise InvalidConfigError(
            f"video_index {video_index} outside corpus of {spec.n_videos}")
    rng = np.random.default_rng([spec.seed, video_index, 0])
    lengths = _draw_shot_lengths(spec, rng)
    windows = [int(rng.integers(0, 3))]
    for _ in lengths[1:]:
        step = int(rng.integers(1, 3))
        windows.append((windows[-1] + step) % 3)
    classes = _draw_classes(len(lengths), spec, rng)

    shots = []
    start = 0
    for length, window, cls in zip(lengths, windows, classes):
        lo = _WINDOW_STARTS[window]
        if cls == "A":
            base = _sawtooth_base(spec.height, spec.width, lo, vertical=True)
            _checker_stamp(base)
        elif cls == "B":
            base = _sawtooth_base(spec.height, spec.width, lo, vertical=False)
        else:
            base = _blob_base(spec.height, spec.width, lo, rng)
        shots.append(Shot(start=start, length=length, cls=cls,
                          window=window, base=base))
        start += length

    video_id = f"synth{video_index:04d}"
    meta = VideoMeta(video_id, width=spec.width, height=spec.height,
                     n_frames=spec.frames_per_video)
    cuts = CutList(video_id, spec.frames_per_video,
                   tuple(s.start for s in shots[1:]))
    shots = tuple(shots)
    return SynthVideo(video_id=video_id, meta=meta, shots=shots, cuts=cuts,
                      segments=_ground_truth(shots), spec=spec,
                      video_index=video_index)


def generate_corpus(spec: CorpusSpec, root: Path | str) -> dict:
    """Write every video plus its ground truth and return the manifest.

    Layout under root: videos/<id>.gry, annotations/<id>.cuts.json,
    annotations/<id>.segments.json, and corpus.json (the manifest, with
    paths kept relative so the tree can move).
    """
    root = Path(root)
    (root / "videos").mkdir(parents=True, exist_ok=True)
    (root / "annotations").mkdir(parents=True, exist_ok=True)
    entries = []
    for index in range(spec.n_videos):
        video = generate_video(spec, index)
        gry_path = root / "videos" / f"{video.video_id}.gry"
        write_gry(gry_path, video.meta, video.frames())
        (root / "annotations" / f"{video.video_id}.cuts.json").write_text(
            cuts_to_json(video.cuts))
        (root / "annotations" / f"{video.video_id}.segments.json").write_text(
            segments_to_json(video.video_id, list(video.segments)))
        entries.append({
            "video_id": video.video_id,
            "path": f"videos/{video.video_id}.gry",
            "size_bytes": gry_path.stat().st_size,
            "n_frames": spec.frames_per_video,
            "width": spec.width,
            "height": spec.height,
            "gt_cuts": list(video.cuts.cuts),
            "gt_segments": [[s.start, s.end] for s in video.segments],
            "shot_classes": [[s.start, s.cls] for s in video.shots],
        })
    entries.sort(key=lambda e: e["video_id"])
    manifest = {
        "format_version": MANIFEST_FORMAT_VERSION,
        "spec": {
            "n_videos": spec.n_videos,
            "frames_per_video": spec.frames_per_video,
            "width": spec.width,
            "height": spec.height,
            "shot_len_range": list(spec.shot_len_range),
            "class_mix": list(spec.class_mix),
            "noise_level": spec.noise_level,
            "seed": spec.seed,
        },
        "videos": entries,
    }
    text = json.dumps(manifest, sort_keys=True, indent=2) + "\n"
    (root / "corpus.json").write_text(text)
    return manifest


def manifest_digest(manifest: dict) -> str:
    canonical = json.dumps(manifest, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def load_manifest(root: Path | str) -> dict:
    path = Path(root) / "corpus.json"
    doc = json.loads(path.read_text())
    if doc.get("format_version") != MANIFEST_FORMAT_VERSION:
        raise InvalidConfigError(
            f"unsupported corpus manifest version {doc.get('format_version')!r}")
    return doc
