"""Per-frame descriptors: gray histograms, consecutive-frame differences, HOG.

The difference features drive CUT detection; the HOG descriptor characterizes
the first frame of a camera shot.  All operations are pure and safe to run in
parallel across frames and videos.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import FrameSizeError, InvalidBinsError, ShapeError, StreamFormatError, TruncatedStreamError

DIFF_KINDS = ("gray_hist", "rgb_hist", "weighted_chi2")
HOG_MAGIC = b"HOG1"
CHI2_EPS = 1.0


@dataclass(frozen=True)
class GrayHistogram:
    """Bin counts of one grayscale frame; counts always sum to the pixel count."""

    n_bins: int
    counts: np.ndarray

    def __post_init__(self):
        if self.n_bins < 1:
            raise InvalidBinsError(f"n_bins must be >= 1, got {self.n_bins}")


@dataclass(frozen=True)
class DiffSeries:
    """Per-consecutive-pair difference values for one video (length n_frames-1)."""

    video_id: str
    kind: str
    n_bins: int
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in DIFF_KINDS:
            raise ShapeError(f"unknown diff kind {self.kind!r}")


@dataclass(frozen=True)
class HogParams:
    """Grid layout and normalization constants for the HOG descriptor.

    Defaults are the classical configuration: 8-px cells, 2x2-cell blocks at
    1-cell stride, 9 unsigned orientation bins of 20 degrees, L2-Hys with
    clip 0.2.  Trailing pixels that do not fill a cell are discarded.
    """

    cell: int = 8
    block: int = 2
    block_stride: int = 1
    n_orient_bins: int = 9
    clip: float = 0.2
    eps_norm: float = 1e-6

    def __post_init__(self):
        for name in ("cell", "block", "block_stride", "n_orient_bins"):
            if getattr(self, name) <= 0:
                raise ShapeError(f"{name} must be positive")
        if self.clip <= 0 or self.eps_norm <= 0:
            raise ShapeError("clip and eps_norm must be positive")

    def grid(self, height: int, width: int) -> tuple[int, int, int, int]:
        """(cells_y, cells_x, blocks_y, blocks_x) for a frame of the given size."""
        cells_y = height // self.cell
        cells_x = width // self.cell
        blocks_y = (cells_y - self.block) // self.block_stride + 1
        blocks_x = (cells_x - self.block) // self.block_stride + 1
        return cells_y, cells_x, blocks_y, blocks_x

    def descriptor_length(self, height: int, width: int) -> int:
        _, _, by, bx = self.grid(height, width)
        return by * bx * self.block * self.block * self.n_orient_bins


@dataclass(frozen=True)
class HogDescriptor:
    values: np.ndarray
    params: HogParams
    frame_dims: tuple[int, int]


def gray_histogram(frame, n_bins: int = 256) -> GrayHistogram:
    """Histogram a uint8 frame; value v lands in bin floor(v * n_bins / 256)."""
    if n_bins < 1:
        raise InvalidBinsError(f"n_bins must be >= 1, got {n_bins}")
    pixels = np.asarray(frame, dtype=np.int64).ravel()
    bins = pixels * n_bins // 256
    counts = np.bincount(bins, minlength=n_bins)
    return GrayHistogram(n_bins=n_bins, counts=counts)


def sum_abs_hist_diff(h1: GrayHistogram, h2: GrayHistogram) -> float:
    """Summed absolute per-bin count difference between two histograms."""
    if h1.n_bins != h2.n_bins:
        raise ShapeError(f"bin counts differ: {h1.n_bins} vs {h2.n_bins}")
    return float(np.sum(np.abs(h1.counts - h2.counts)))


def weighted_chi2_diff(h1: GrayHistogram, h2: GrayHistogram) -> float:
    """Symmetric chi-squared distance sum((a-b)^2 / (a+b+eps)) with eps=1."""
    if h1.n_bins != h2.n_bins:
        raise ShapeError(f"bin counts differ: {h1.n_bins} vs {h2.n_bins}")
    a = h1.counts.astype(np.float64)
    b = h2.counts.astype(np.float64)
    return float(np.sum((a - b) ** 2 / (a + b + CHI2_EPS)))


def rgb_histograms(r_plane, g_plane, b_plane, n_bins: int = 256) -> tuple[GrayHistogram, GrayHistogram, GrayHistogram]:
    """Independent per-channel histograms of an RGB frame."""
    return (gray_histogram(r_plane, n_bins),
            gray_histogram(g_plane, n_bins),
            gray_histogram(b_plane, n_bins))


def sum_abs_rgb_diff(channels1, channels2) -> float:
    """Per-channel summed absolute differences, added across the three channels."""
    return sum(sum_abs_hist_diff(a, b) for a, b in zip(channels1, channels2))


def diff_series(source, kind: str = "gray_hist", n_bins: int = 256) -> DiffSeries:
    """Consecutive-frame difference values over a whole video, streamed.

    Only two frames are resident at a time.  A source shorter than two frames
    yields an empty series.  For the "rgb_hist" kind on a grayscale stream the
    single plane stands in for all three channels, so the value is three times
    the gray difference; it exists to keep the per-channel comparison path
    exercisable without a color stream format.
    """
    if kind not in DIFF_KINDS:
        raise ShapeError(f"unknown diff kind {kind!r}")
    n = source.meta.n_frames
    values = np.zeros(max(0, n - 1), dtype=np.float64)
    if n >= 2:
        prev = gray_histogram(source.read_frame(0), n_bins)
        for i in range(1, n):
            cur = gray_histogram(source.read_frame(i), n_bins)
            if kind == "gray_hist":
                values[i - 1] = sum_abs_hist_diff(prev, cur)
            elif kind == "rgb_hist":
                values[i - 1] = 3.0 * sum_abs_hist_diff(prev, cur)
            else:
                values[i - 1] = weighted_chi2_diff(prev, cur)
            prev = cur
    return DiffSeries(video_id=source.meta.video_id, kind=kind, n_bins=n_bins, values=values)


def hog(frame, params: HogParams = HogParams()) -> HogDescriptor:
    """HOG descriptor of one grayscale frame.

    Centered-difference gradients with border replication, unsigned orientation
    with hard 20-degree binning (no interpolation), magnitude-weighted cell
    histograms, overlapping blocks normalized by L2-Hys, concatenated row-major.
    """
    pixels = np.asarray(frame, dtype=np.float64)
    if pixels.ndim != 2:
        raise FrameSizeError(f"expected a 2-d frame, got shape {pixels.shape}")
    h, w = pixels.shape
    cells_y, cells_x, blocks_y, blocks_x = params.grid(h, w)
    if cells_y < params.block or cells_x < params.block:
        raise FrameSizeError(
            f"frame {h}x{w} smaller than one {params.block}x{params.block}-cell block")

    padded = np.pad(pixels, 1, mode="edge")
    gx = padded[1:-1, 2:] - padded[1:-1, :-2]
    gy = padded[2:, 1:-1] - padded[:-2, 1:-1]
    magnitude = np.hypot(gx, gy)
    theta = np.degrees(np.arctan2(gy, gx)) % 180.0
    bin_width = 180.0 / params.n_orient_bins
    orient = (theta / bin_width).astype(np.int64) % params.n_orient_bins

    # magnitude-weighted orientation histogram per cell
    ch, cw = cells_y * params.cell, cells_x * params.cell
    cell_idx_y = np.arange(ch) // params.cell
    cell_idx_x = np.arange(cw) // params.cell
    flat_cell = (cell_idx_y[:, None] * cells_x + cell_idx_x[None, :])
    key = flat_cell * params.n_orient_bins + orient[:ch, :cw]
    cell_hist = np.bincount(key.ravel(), weights=magnitude[:ch, :cw].ravel(),
                            minlength=cells_y * cells_x * params.n_orient_bins)
    cell_hist = cell_hist.reshape(cells_y, cells_x, params.n_orient_bins)

    block_len = params.block * params.block * params.n_orient_bins
    out = np.empty(blocks_y * blocks_x * block_len, dtype=np.float64)
    pos = 0
    for by in range(blocks_y):
        y0 = by * params.block_stride
        for bx in range(blocks_x):
            x0 = bx * params.block_stride
            v = cell_hist[y0:y0 + params.block, x0:x0 + params.block, :].ravel()
            v = v / np.sqrt(np.sum(v * v) + params.eps_norm ** 2)
            v = np.minimum(v, params.clip)
            v = v / np.sqrt(np.sum(v * v) + params.eps_norm ** 2)
            out[pos:pos + block_len] = v
            pos += block_len
    return HogDescriptor(values=out, params=params, frame_dims=(h, w))


# --- persistence -----------------------------------------------------------

def write_diff_series(path, series: DiffSeries) -> None:
    """One file per video: a tab-separated header line, then one value per line."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{series.video_id}\t{series.kind}\t{series.n_bins}\n")
        for v in series.values:
            f.write(repr(float(v)) + "\n")


def read_diff_series(path) -> DiffSeries:
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().rstrip("\n")
        parts = header.split("\t")
        if len(parts) != 3:
            raise StreamFormatError(f"bad diff-series header {header!r}")
        video_id, kind, n_bins = parts[0], parts[1], int(parts[2])
        values = np.array([float(line) for line in f if line.strip()], dtype=np.float64)
    return DiffSeries(video_id=video_id, kind=kind, n_bins=n_bins, values=values)


def write_hog_block(path, descriptors) -> None:
    """Binary block of descriptors: [magic "HOG1"][dims u32][count u32][payload f64 LE]."""
    descriptors = list(descriptors)
    dims = len(descriptors[0].values) if descriptors else 0
    with open(path, "wb") as f:
        f.write(HOG_MAGIC)
        f.write(struct.pack("<II", dims, len(descriptors)))
        for d in descriptors:
            if len(d.values) != dims:
                raise ShapeError("descriptors in one block must share dims")
            f.write(np.asarray(d.values, dtype="<f8").tobytes())


def read_hog_block(path) -> np.ndarray:
    """Read a descriptor block back as a (count, dims) float64 array."""
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != HOG_MAGIC:
            raise StreamFormatError(f"bad magic {magic!r}, expected {HOG_MAGIC!r}")
        raw = f.read(8)
        if len(raw) < 8:
            raise TruncatedStreamError("HOG block header truncated", offset=4 + len(raw))
        dims, count = struct.unpack("<II", raw)
        payload = f.read(8 * dims * count)
        if len(payload) < 8 * dims * count:
            raise TruncatedStreamError("HOG block payload truncated", offset=12 + len(payload))
    return np.frombuffer(payload, dtype="<f8").reshape(count, dims).copy()
