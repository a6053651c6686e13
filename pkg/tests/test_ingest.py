import struct

import numpy as np
import pytest

from strokeloc import ingest
from strokeloc.errors import (
    InvalidTargetError,
    RangeError,
    StreamFormatError,
    TruncatedStreamError,
)


def make_frames(n, h=6, w=8, seed=0):
    rng = np.random.default_rng(seed)
    return [rng.integers(0, 256, size=(h, w), dtype=np.uint8) for _ in range(n)]


def test_plan_decode_default_target():
    cmd = ingest.plan_decode("match.mp4", ingest.VideoMeta("match"))
    assert "scale=640:360" in cmd.argv
    assert "-r" in cmd.argv
    assert cmd.argv[cmd.argv.index("-r") + 1] == "25"
    assert "gray" in cmd.argv


def test_plan_decode_source_agnostic():
    target = ingest.VideoMeta("v", width=320, height=240, fps=30)
    a = ingest.plan_decode("a.mp4", target)
    b = ingest.plan_decode("a.mp4", target)
    assert a.argv == b.argv


def test_plan_decode_rejects_zero_fps():
    with pytest.raises(InvalidTargetError):
        ingest.VideoMeta("v", fps=0)


def test_meta_rejects_bad_dims():
    with pytest.raises(InvalidTargetError):
        ingest.VideoMeta("v", width=0)
    with pytest.raises(InvalidTargetError):
        ingest.VideoMeta("v", height=-1)


def test_to_gray_cases():
    assert ingest.to_gray(255, 255, 255) == 255
    assert ingest.to_gray(0, 0, 0) == 0
    # round(0.299 * 255)
    assert ingest.to_gray(255, 0, 0) == 76


def test_to_gray_equal_channels_identity_and_monotone():
    for v in range(256):
        assert ingest.to_gray(v, v, v) == v
    prev = -1
    for r in range(256):
        cur = ingest.to_gray(r, 10, 10)
        assert cur >= prev
        prev = cur


def test_gray_from_rgb_matches_scalar():
    rng = np.random.default_rng(3)
    rgb = rng.integers(0, 256, size=(5, 7, 3), dtype=np.uint8)
    out = ingest.gray_from_rgb(rgb)
    for y in range(5):
        for x in range(7):
            assert out[y, x] == ingest.to_gray(*(int(c) for c in rgb[y, x]))


def test_gry_round_trip(tmp_path):
    frames = make_frames(5)
    meta = ingest.VideoMeta("clip", width=8, height=6, fps=25)
    path = tmp_path / "clip.gry"
    written = ingest.write_gry(path, meta, frames)
    assert written.n_frames == 5
    with ingest.open_gry(path) as src:
        assert src.meta.n_frames == 5
        assert src.meta.width == 8 and src.meta.height == 6
        again = list(src.iter_frames())
    for a, b in zip(frames, again):
        assert np.array_equal(a, b)

    # second round trip through the writer is byte-identical
    path2 = tmp_path / "copy.gry"
    with ingest.open_gry(path) as src:
        ingest.write_gry(path2, src.meta, src.iter_frames())
    assert path.read_bytes() == path2.read_bytes()


def test_open_gry_valid_header(tmp_path):
    frames = make_frames(100, h=6, w=8)
    path = tmp_path / "v.gry"
    ingest.write_gry(path, ingest.VideoMeta("v", width=8, height=6), frames)
    src = ingest.open_gry(path)
    assert src.meta.n_frames == 100
    src.close()


def test_open_gry_bad_magic(tmp_path):
    path = tmp_path / "bad.gry"
    path.write_bytes(b"XXXX" + b"\x00" * 20)
    with pytest.raises(StreamFormatError):
        ingest.open_gry(path)


def test_open_gry_truncated_body(tmp_path):
    frames = make_frames(10, h=4, w=4)
    path = tmp_path / "t.gry"
    ingest.write_gry(path, ingest.VideoMeta("t", width=4, height=4), frames)
    data = path.read_bytes()
    # header claims 10 frames; drop the last frame's bytes
    clipped = data[: ingest.HEADER_SIZE + 9 * 16]
    path.write_bytes(clipped[:16] + struct.pack("<Q", 10) + clipped[24:])
    with pytest.raises(TruncatedStreamError):
        ingest.open_gry(path)


def test_seek_matches_sequential(tmp_path):
    frames = make_frames(12, h=5, w=5, seed=9)
    path = tmp_path / "s.gry"
    ingest.write_gry(path, ingest.VideoMeta("s", width=5, height=5), frames)
    with ingest.open_gry(path) as src:
        sequential = [f.copy() for f in src.iter_frames()]
    with ingest.open_gry(path) as src:
        for i in [7, 0, 11, 3, 3, 10]:
            assert np.array_equal(src.read_frame(i), sequential[i])


def test_seek_out_of_range(tmp_path):
    path = tmp_path / "r.gry"
    ingest.write_gry(path, ingest.VideoMeta("r", width=4, height=4), make_frames(3, 4, 4))
    with ingest.open_gry(path) as src:
        with pytest.raises(RangeError):
            src.seek(3)
        with pytest.raises(RangeError):
            src.read_frame(99)


def test_run_decode_wraps_stub_decoder(tmp_path):
    # stand-in decoder that emits 3 raw 4x4 gray frames on stdout
    stub = tmp_path / "stub.py"
    stub.write_text(
        "import sys\n"
        "sys.stdout.buffer.write(bytes(range(16)) * 3)\n"
    )
    target = ingest.VideoMeta("stubbed", width=4, height=4, fps=25)
    cmd = ingest.DecodeCommand(argv=("python3", str(stub)), target=target)
    out = tmp_path / "stubbed.gry"
    meta = ingest.run_decode(cmd, out)
    assert meta.n_frames == 3
    with ingest.open_gry(out) as src:
        frame = src.read_frame(0)
        assert frame.ravel().tolist() == list(range(16))
