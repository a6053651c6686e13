"""Filesystem layout shared by every CLI stage.

A workspace is a plain directory tree; each stage finds its inputs and
leaves its outputs by video id, so partial re-runs need no bookkeeping
beyond the files themselves. Nothing in here writes outside the root.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .errors import NotFoundError

ENV_ROOT = "STROKELOC_WORKSPACE"

SUBDIRS = ("videos", "features", "models", "predictions", "annotations", "reports")


@dataclass(frozen=True)
class Workspace:
    root: Path

    def __post_init__(self) -> None:
        object.__setattr__(self, "root", Path(self.root))

    @property
    def videos(self) -> Path:
        return self.root / "videos"

    @property
    def features(self) -> Path:
        return self.root / "features"

    @property
    def models(self) -> Path:
        return self.root / "models"

    @property
    def predictions(self) -> Path:
        return self.root / "predictions"

    @property
    def annotations(self) -> Path:
        return self.root / "annotations"

    @property
    def reports(self) -> Path:
        return self.root / "reports"

    def ensure(self) -> "Workspace":
        for name in SUBDIRS:
            (self.root / name).mkdir(parents=True, exist_ok=True)
        return self

    # -- per-artifact paths --------------------------------------------------

    def video_path(self, video_id: str) -> Path:
        return self.videos / f"{video_id}.gry"

    def diffs_path(self, video_id: str, kind: str) -> Path:
        return self.features / f"{video_id}.{kind}.diffs"

    def hog_path(self, video_id: str) -> Path:
        return self.features / f"{video_id}.hog"

    def model_path(self, name: str) -> Path:
        return self.models / f"{name}.json"

    def pred_cuts_path(self, video_id: str) -> Path:
        return self.predictions / f"{video_id}.cuts.json"

    def pred_segments_path(self, video_id: str, T: int | None = None) -> Path:
        if T is None:
            return self.predictions / f"{video_id}.segments.json"
        return self.predictions / f"{video_id}.segments.T{int(T)}.json"

    def gt_cuts_path(self, video_id: str) -> Path:
        return self.annotations / f"{video_id}.cuts.json"

    def gt_segments_path(self, video_id: str) -> Path:
        return self.annotations / f"{video_id}.segments.json"

    def report_path(self, name: str) -> Path:
        return self.reports / name

    def corpus_manifest_path(self) -> Path:
        return self.root / "corpus.json"

    # -- discovery -----------------------------------------------------------

    def video_ids(self) -> list[str]:
        if not self.videos.is_dir():
            return []
        return sorted(p.stem for p in self.videos.glob("*.gry"))

    def require(self, path: Path, hint: str = "") -> Path:
        if not path.exists():
            message = f"missing {path}"
            if hint:
                message += f" ({hint})"
            raise NotFoundError(message)
        return path


def resolve_workspace(arg: str | None) -> Workspace:
    """Pick the workspace root: explicit flag, then the environment
    override, then the current directory."""
    root = arg or os.environ.get(ENV_ROOT) or "."
    return Workspace(Path(root))
