"""HTTP service behind the review tool: frames out, annotations in.

Runs on the stdlib threading server. Annotation writes go through a
per-video lock and an atomic rename, and every accepted write bumps the
record's revision; a writer must present the revision it last saw, so two
annotators can never silently overwrite each other.
"""

from __future__ import annotations

import io
import json
import logging
import mimetypes
import os
import re
import threading
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from PIL import Image

from .errors import NotFoundError, RangeError, StrokelocError
from .ingest import open_gry, read_gry_meta
from .pipeline import (
    SEGMENTS_FORMAT_VERSION,
    Segment,
    segments_from_json,
    segments_to_json,
)
from .workspace import Workspace

log = logging.getLogger(__name__)

_FRAME_ROUTE = re.compile(r"/api/videos/([^/]+)/frame/(\d+)")
_PREDICTIONS_ROUTE = re.compile(r"/api/videos/([^/]+)/predictions")
_ANNOTATIONS_ROUTE = re.compile(r"/api/videos/([^/]+)/annotations")


class BadRequest(Exception):
    """A request body problem tied to one field."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


def validate_segments(raw, n_frames: int) -> list[Segment]:
    """Check a request's segment list against the video's frame range and
    the pairwise-disjointness rule; field names in errors index into the
    submitted list."""
    if not isinstance(raw, list):
        raise BadRequest("segments", "must be a list of [start, end] pairs")
    segments = []
    for i, entry in enumerate(raw):
        field = f"segments[{i}]"
        if (not isinstance(entry, (list, tuple)) or len(entry) != 2
                or not all(isinstance(v, int) and not isinstance(v, bool)
                           for v in entry)):
            raise BadRequest(field, "must be an [start, end] integer pair")
        s, e = entry
        if s > e:
            raise BadRequest(field, f"start {s} > end {e}")
        if s < 0 or e > n_frames - 1:
            raise BadRequest(field,
                             f"[{s}, {e}] outside frame range 0..{n_frames - 1}")
        segments.append((s, e, i))
    segments.sort()
    for (s1, e1, i1), (s2, e2, i2) in zip(segments, segments[1:]):
        if e1 >= s2:
            raise BadRequest(f"segments[{i2}]",
                             f"[{s2}, {e2}] overlaps segments[{i1}] [{s1}, {e1}]")
    return [Segment(s, e) for s, e, _ in segments]


class AnnotationStore:
    """Revisioned segment records under annotations/, one file per video.

    Files carry the same structure the evaluation commands read, plus the
    revision and timestamp, so a saved annotation is directly scoreable.
    """

    def __init__(self, ws: Workspace) -> None:
        self.ws = ws
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _lock_for(self, video_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(video_id, threading.Lock())

    def read(self, video_id: str) -> dict:
        path = self.ws.gt_segments_path(video_id)
        if not path.exists():
            return {"format_version": SEGMENTS_FORMAT_VERSION,
                    "video_id": video_id, "segments": [], "revision": 0}
        text = path.read_text()
        _, segments = segments_from_json(text)
        raw = json.loads(text)
        record = {"format_version": SEGMENTS_FORMAT_VERSION,
                  "video_id": video_id,
                  "segments": [[s.start, s.end] for s in segments],
                  "revision": int(raw.get("revision", 0))}
        if "updated_at" in raw:
            record["updated_at"] = raw["updated_at"]
        return record

    def write(self, video_id: str, segments: list[Segment],
              expected_revision: int) -> tuple[bool, dict]:
        """Either (True, new record) or (False, current record) when the
        caller's revision is stale."""
        with self._lock_for(video_id):
            current = self.read(video_id)
            if expected_revision != current["revision"]:
                return False, current
            revision = current["revision"] + 1
            updated_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
            text = segments_to_json(video_id, segments,
                                    revision=revision, updated_at=updated_at)
            path = self.ws.gt_segments_path(video_id)
            tmp = path.with_name(path.name + ".tmp")
            tmp.write_text(text)
            os.replace(tmp, path)
            return True, {"format_version": SEGMENTS_FORMAT_VERSION,
                          "video_id": video_id,
                          "segments": [[s.start, s.end] for s in segments],
                          "revision": revision, "updated_at": updated_at}


class AnnotationService:
    def __init__(self, ws: Workspace, static_dir: str | None = None) -> None:
        self.ws = ws
        self.store = AnnotationStore(ws)
        self.static_dir = Path(static_dir).resolve() if static_dir else None

    def _meta(self, video_id: str):
        path = self.ws.video_path(video_id)
        if not path.exists():
            raise NotFoundError(f"unknown video {video_id!r}")
        return read_gry_meta(path, video_id)

    def list_videos(self) -> list[dict]:
        entries = []
        for vid in self.ws.video_ids():
            meta = self._meta(vid)
            entries.append({
                "video_id": vid,
                "width": meta.width,
                "height": meta.height,
                "fps": meta.fps,
                "n_frames": meta.n_frames,
                "has_predictions": self.ws.pred_segments_path(vid).exists(),
                "annotation_revision": self.store.read(vid)["revision"],
            })
        return entries

    def frame_png(self, video_id: str, index: int) -> bytes:
        self._meta(video_id)
        with open_gry(self.ws.video_path(video_id), video_id) as source:
            frame = source.read_frame(index)
        buf = io.BytesIO()
        Image.fromarray(frame, mode="L").save(buf, format="PNG")
        return buf.getvalue()

    def predictions_text(self, video_id: str) -> str:
        self._meta(video_id)
        path = self.ws.pred_segments_path(video_id)
        if not path.exists():
            raise NotFoundError(f"no predictions for {video_id!r}")
        return path.read_text()

    def annotations(self, video_id: str) -> dict:
        self._meta(video_id)
        return self.store.read(video_id)

    def put_annotations(self, video_id: str, body: bytes) -> tuple[int, dict]:
        """Returns (http status, response document)."""
        meta = self._meta(video_id)
        try:
            doc = json.loads(body)
        except json.JSONDecodeError as exc:
            raise BadRequest("body", f"invalid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise BadRequest("body", "must be a JSON object")
        if "revision" not in doc:
            raise BadRequest("revision", "missing expected revision")
        revision = doc["revision"]
        if not isinstance(revision, int) or isinstance(revision, bool) or revision < 0:
            raise BadRequest("revision", "must be a non-negative integer")
        if "segments" not in doc:
            raise BadRequest("segments", "missing segment list")
        segments = validate_segments(doc["segments"], meta.n_frames)
        accepted, record = self.store.write(video_id, segments, revision)
        return (200, record) if accepted else (409, record)


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    @property
    def svc(self) -> AnnotationService:
        return self.server.service  # type: ignore[attr-defined]

    def log_message(self, format: str, *args) -> None:
        log.debug("%s %s", self.address_string(), format % args)

    # -- responses -----------------------------------------------------------

    def _cors(self) -> None:
        self.send_header("Access-Control-Allow-Origin", "*")

    def _send_bytes(self, status: int, payload: bytes, content_type: str) -> None:
        self.send_response(status)
        self._cors()
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def _send_json(self, status: int, doc: dict) -> None:
        payload = (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode()
        self._send_bytes(status, payload, "application/json")

    def _send_field_error(self, field: str, message: str) -> None:
        self._send_json(400, {"error": {"field": field, "message": message}})

    def _send_not_found(self, message: str) -> None:
        self._send_json(404, {"error": {"message": message}})

    # -- routing -------------------------------------------------------------

    def do_OPTIONS(self) -> None:
        self.send_response(204)
        self._cors()
        self.send_header("Access-Control-Allow-Methods", "GET, PUT, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self) -> None:
        path = self.path.split("?", 1)[0]
        try:
            if path == "/api/videos":
                self._send_json(200, {"videos": self.svc.list_videos()})
            elif m := _FRAME_ROUTE.fullmatch(path):
                payload = self.svc.frame_png(m.group(1), int(m.group(2)))
                self._send_bytes(200, payload, "image/png")
            elif m := _PREDICTIONS_ROUTE.fullmatch(path):
                payload = self.svc.predictions_text(m.group(1)).encode()
                self._send_bytes(200, payload, "application/json")
            elif m := _ANNOTATIONS_ROUTE.fullmatch(path):
                self._send_json(200, self.svc.annotations(m.group(1)))
            elif self.svc.static_dir is not None:
                self._send_static(path)
            else:
                self._send_not_found(f"no route for {path}")
        except (NotFoundError, RangeError) as exc:
            self._send_not_found(str(exc))
        except StrokelocError as exc:
            self._send_json(500, {"error": {"message": str(exc)}})

    def do_PUT(self) -> None:
        path = self.path.split("?", 1)[0]
        m = _ANNOTATIONS_ROUTE.fullmatch(path)
        if m is None:
            self._send_not_found(f"no PUT route for {path}")
            return
        length = int(self.headers.get("Content-Length") or 0)
        body = self.rfile.read(length)
        try:
            status, doc = self.svc.put_annotations(m.group(1), body)
            self._send_json(status, doc)
        except BadRequest as exc:
            self._send_field_error(exc.field, exc.message)
        except NotFoundError as exc:
            self._send_not_found(str(exc))

    def _send_static(self, path: str) -> None:
        name = "index.html" if path == "/" else path.lstrip("/")
        root = self.svc.static_dir
        assert root is not None
        target = (root / name).resolve()
        if not str(target).startswith(str(root) + os.sep) and target != root:
            self._send_not_found("outside static root")
            return
        if not target.is_file():
            self._send_not_found(f"no file {name}")
            return
        content_type = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        self._send_bytes(200, target.read_bytes(), content_type)


def make_server(ws: Workspace, host: str = "127.0.0.1", port: int = 8765,
                static_dir: str | None = None) -> ThreadingHTTPServer:
    """Bind the service; the caller decides when to serve_forever()."""
    server = ThreadingHTTPServer((host, port), _Handler)
    server.service = AnnotationService(ws, static_dir=static_dir)  # type: ignore[attr-defined]
    return server


def serve(ws: Workspace, host: str = "127.0.0.1", port: int = 8765,
          static_dir: str | None = None) -> None:
    server = make_server(ws, host=host, port=port, static_dir=static_dir)
    try:
        server.serve_forever()
    finally:
        server.server_close()
