"""Frame acquisition: the raw ".gry" grayscale stream, decode planning, RGB-to-gray.

Compressed video is never decoded in-process.  An external decoder (ffmpeg by
default) is asked to rescale/resample and emit headerless 8-bit grayscale
rasters; this module wraps that byte stream into the ".gry" container:

    [magic "GRY1"][width u32][height u32][fps u32][n_frames u64]   little-endian
    followed by n_frames rasters of width*height bytes, row-major, top-left origin.
"""

from __future__ import annotations

import struct
import subprocess
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidTargetError, RangeError, StreamFormatError, TruncatedStreamError

GRY_MAGIC = b"GRY1"
_HEADER = struct.Struct("<4sIIIQ")  # magic, width, height, fps, n_frames
HEADER_SIZE = _HEADER.size
_N_FRAMES_OFFSET = 16  # byte offset of the n_frames field inside the header


@dataclass(frozen=True)
class VideoMeta:
    """Dimensions and timing of one normalized video stream."""

    video_id: str
    width: int = 640
    height: int = 360
    fps: int = 25
    n_frames: int = 0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise InvalidTargetError(f"dimensions must be positive, got {self.width}x{self.height}")
        if self.fps <= 0:
            raise InvalidTargetError(f"fps must be positive, got {self.fps}")
        if self.n_frames < 0:
            raise InvalidTargetError(f"n_frames must be >= 0, got {self.n_frames}")

    @property
    def frame_bytes(self) -> int:
        return self.width * self.height

    @property
    def pixel_count(self) -> int:
        return self.width * self.height


@dataclass(frozen=True)
class DecodeCommand:
    """Argument vector for the external decoder plus the stream geometry it emits."""

    argv: tuple[str, ...]
    target: VideoMeta


def to_gray(r: int, g: int, b: int) -> int:
    """BT.601 luma of one RGB pixel, rounded half-up and clamped to [0, 255]."""
    v = int(0.299 * r + 0.587 * g + 0.114 * b + 0.5)
    return min(255, max(0, v))


def gray_from_rgb(rgb) -> np.ndarray:
    """Vectorized BT.601 conversion of an (h, w, 3) uint8 array to (h, w) uint8."""
    rgb = np.asarray(rgb, dtype=np.float64)
    v = np.floor(0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2] + 0.5)
    return np.clip(v, 0, 255).astype(np.uint8)


def plan_decode(src_path: str, target: VideoMeta, decoder: str = "ffmpeg") -> DecodeCommand:
    """Build the decoder invocation that emits headerless gray8 rasters on stdout.

    Planning is source-agnostic: only the target geometry shapes the command.
    The caller (see :func:`run_decode`) adds the ".gry" header around the
    decoder's output, since no stock decoder can write it.
    """
    if target.width <= 0 or target.height <= 0 or target.fps <= 0:
        raise InvalidTargetError("decode target needs positive dimensions and fps")
    argv = (
        decoder,
        "-hide_banner",
        "-loglevel", "error",
        "-i", str(src_path),
        "-vf", f"scale={target.width}:{target.height}",
        "-r", str(target.fps),
        "-f", "rawvideo",
        "-pix_fmt", "gray",
        "-an", "-sn",
        "pipe:1",
    )
    return DecodeCommand(argv=argv, target=target)


def run_decode(command: DecodeCommand, out_path) -> VideoMeta:
    """Execute a decode command and spool its raster stream into a ".gry" file.

    The frame count is unknown until the decoder closes its pipe, so the header
    is written with a placeholder and patched once the stream ends.  Returns the
    final metadata of the written file.
    """
    frame_bytes = command.target.frame_bytes
    proc = subprocess.Popen(command.argv, stdout=subprocess.PIPE)
    assert proc.stdout is not None
    n = 0
    try:
        with open(out_path, "wb") as sink:
            sink.write(_HEADER.pack(GRY_MAGIC, command.target.width, command.target.height,
                                    command.target.fps, 0))
            pending = b""
            while True:
                chunk = proc.stdout.read(frame_bytes - len(pending))
                if not chunk:
                    break
                pending += chunk
                if len(pending) == frame_bytes:
                    sink.write(pending)
                    pending = b""
                    n += 1
            sink.seek(_N_FRAMES_OFFSET)
            sink.write(struct.pack("<Q", n))
    finally:
        proc.stdout.close()
        proc.wait()
    if proc.returncode != 0:
        raise StreamFormatError(f"decoder exited with status {proc.returncode}")
    meta = VideoMeta(command.target.video_id, command.target.width, command.target.height,
                     command.target.fps, n)
    return meta


def write_gry(path, meta: VideoMeta, frames) -> VideoMeta:
    """Write frames (iterable of (h, w) uint8 arrays) as a ".gry" file.

    The header frame count is patched after the iterable is exhausted, so
    ``meta.n_frames`` need not be known up front.
    """
    n = 0
    with open(path, "wb") as sink:
        sink.write(_HEADER.pack(GRY_MAGIC, meta.width, meta.height, meta.fps, 0))
        for frame in frames:
            arr = np.ascontiguousarray(frame, dtype=np.uint8)
            if arr.shape != (meta.height, meta.width):
                raise StreamFormatError(
                    f"frame shape {arr.shape} does not match {meta.height}x{meta.width}")
            sink.write(arr.tobytes())
            n += 1
        sink.seek(_N_FRAMES_OFFSET)
        sink.write(struct.pack("<Q", n))
    return VideoMeta(meta.video_id, meta.width, meta.height, meta.fps, n)


def read_gry_meta(path, video_id: str | None = None) -> VideoMeta:
    """Parse only the header of a ".gry" file."""
    with open(path, "rb") as f:
        header = f.read(HEADER_SIZE)
    return _parse_header(header, video_id or Path(str(path)).stem)


def _parse_header(header: bytes, video_id: str) -> VideoMeta:
    if len(header) < HEADER_SIZE:
        raise TruncatedStreamError(
            f"header needs {HEADER_SIZE} bytes, stream holds {len(header)}", offset=len(header))
    magic, width, height, fps, n_frames = _HEADER.unpack(header)
    if magic != GRY_MAGIC:
        raise StreamFormatError(f"bad magic {magic!r}, expected {GRY_MAGIC!r}")
    return VideoMeta(video_id, width, height, fps, n_frames)


class FrameSource:
    """Random-access reader over one ".gry" file.

    Single-owner and single-threaded; open several independent sources for
    concurrent access to the same file.  Frames are read lazily on demand.
    """

    def __init__(self, path, video_id: str | None = None):
        self._path = Path(str(path))
        self._f = open(self._path, "rb")
        try:
            header = self._f.read(HEADER_SIZE)
            self.meta = _parse_header(header, video_id or self._path.stem)
        except Exception:
            self._f.close()
            raise
        self.position = 0
        expected = HEADER_SIZE + self.meta.n_frames * self.meta.frame_bytes
        actual = self._path.stat().st_size
        if actual < expected:
            self._f.close()
            raise TruncatedStreamError(
                f"header promises {self.meta.n_frames} frames "
                f"({expected} bytes), file holds {actual}", offset=actual)

    def seek(self, index: int) -> None:
        if not 0 <= index < self.meta.n_frames:
            raise RangeError(f"frame index {index} outside [0, {self.meta.n_frames})")
        self.position = index

    def read_frame(self, index: int | None = None) -> np.ndarray:
        """Read the frame at `index` (or at the current position) and advance."""
        if index is not None:
            self.seek(index)
        if self.position >= self.meta.n_frames:
            raise RangeError("read past last frame")
        offset = HEADER_SIZE + self.position * self.meta.frame_bytes
        self._f.seek(offset)
        raw = self._f.read(self.meta.frame_bytes)
        if len(raw) < self.meta.frame_bytes:
            raise TruncatedStreamError(
                f"frame {self.position} truncated", offset=offset + len(raw))
        self.position += 1
        return np.frombuffer(raw, dtype=np.uint8).reshape(self.meta.height, self.meta.width)

    def iter_frames(self):
        """Yield frames sequentially from frame 0."""
        for i in range(self.meta.n_frames):
            yield self.read_frame(i)

    def close(self) -> None:
        self._f.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def open_gry(path, video_id: str | None = None) -> FrameSource:
    """Open a ".gry" file for frame-indexed access."""
    return FrameSource(path, video_id=video_id)
