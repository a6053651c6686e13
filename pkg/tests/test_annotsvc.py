import io
import json
import threading
import urllib.error
import urllib.request

import numpy as np
import pytest
from PIL import Image

from strokeloc import annotsvc, cli
from strokeloc.ingest import VideoMeta, write_gry
from strokeloc.pipeline import Segment, segments_from_json, segments_to_json
from strokeloc.workspace import Workspace

N_FRAMES = 100


def http(method: str, url: str, doc=None) -> tuple[int, bytes]:
    body = json.dumps(doc).encode() if doc is not None else None
    req = urllib.request.Request(url, data=body, method=method,
                                 headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req, timeout=10) as resp:
            return resp.status, resp.read()
    except urllib.error.HTTPError as exc:
        with exc:
            return exc.code, exc.read()


def get_json(url: str) -> tuple[int, dict]:
    status, payload = http("GET", url)
    return status, json.loads(payload)


def put_json(url: str, doc) -> tuple[int, dict]:
    status, payload = http("PUT", url, doc)
    return status, json.loads(payload)


@pytest.fixture()
def service(tmp_path):
    ws = Workspace(tmp_path).ensure()
    frames = [np.full((8, 8), i % 251, dtype=np.uint8) for i in range(N_FRAMES)]
    write_gry(ws.video_path("vid0"), VideoMeta("vid0", width=8, height=8), frames)
    ws.pred_segments_path("vid0").write_text(
        segments_to_json("vid0", [Segment(10, 49), Segment(60, 80)]))
    server = annotsvc.make_server(ws, port=0)
    thread = threading.Thread(
        target=lambda: server.serve_forever(poll_interval=0.05), daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{server.server_address[1]}"
    yield ws, base
    server.shutdown()
    thread.join(timeout=5)
    server.server_close()


def test_video_listing_carries_meta(service):
    _, base = service
    status, doc = get_json(f"{base}/api/videos")
    assert status == 200
    (entry,) = doc["videos"]
    assert entry["video_id"] == "vid0"
    assert entry["n_frames"] == N_FRAMES
    assert entry["width"] == 8 and entry["height"] == 8 and entry["fps"] == 25
    assert entry["has_predictions"] is True
    assert entry["annotation_revision"] == 0


def test_frame_endpoint_is_lossless(service):
    _, base = service
    status, payload = http("GET", f"{base}/api/videos/vid0/frame/37")
    assert status == 200
    image = Image.open(io.BytesIO(payload))
    assert image.mode == "L"
    assert np.array_equal(np.asarray(image), np.full((8, 8), 37, dtype=np.uint8))


def test_unknown_video_and_bad_frame_are_404(service):
    _, base = service
    assert http("GET", f"{base}/api/videos/ghost/frame/0")[0] == 404
    assert http("GET", f"{base}/api/videos/vid0/frame/{N_FRAMES}")[0] == 404
    assert http("GET", f"{base}/api/videos/ghost/annotations")[0] == 404
    assert http("GET", f"{base}/api/nope")[0] == 404


def test_predictions_round_trip_verbatim(service):
    ws, base = service
    status, payload = http("GET", f"{base}/api/videos/vid0/predictions")
    assert status == 200
    assert payload.decode() == ws.pred_segments_path("vid0").read_text()
    assert http("GET", f"{base}/api/videos/ghost/predictions")[0] == 404


def test_empty_annotation_record_has_revision_zero(service):
    _, base = service
    status, doc = get_json(f"{base}/api/videos/vid0/annotations")
    assert status == 200
    assert doc["segments"] == []
    assert doc["revision"] == 0


def test_put_then_get_round_trip(service):
    ws, base = service
    url = f"{base}/api/videos/vid0/annotations"
    status, doc = put_json(url, {"segments": [[10, 89]], "revision": 0})
    assert status == 200
    assert doc["segments"] == [[10, 89]]
    assert doc["revision"] == 1
    status, doc = get_json(url)
    assert status == 200
    assert doc["segments"] == [[10, 89]]
    assert doc["revision"] == 1
    # the stored file is the standard segments format, directly scoreable
    vid, segments = segments_from_json(ws.gt_segments_path("vid0").read_text())
    assert vid == "vid0"
    assert segments == [Segment(10, 89)]
    assert not list(ws.annotations.glob("*.tmp"))


def test_stale_revision_yields_409_with_current_record(service):
    _, base = service
    url = f"{base}/api/videos/vid0/annotations"
    assert put_json(url, {"segments": [[10, 89]], "revision": 0})[0] == 200
    status, doc = put_json(url, {"segments": [[0, 5]], "revision": 0})
    assert status == 409
    assert doc["segments"] == [[10, 89]]
    assert doc["revision"] == 1


def test_concurrent_puts_one_wins_one_conflicts(service):
    _, base = service
    url = f"{base}/api/videos/vid0/annotations"
    barrier = threading.Barrier(2)
    statuses = []
    lock = threading.Lock()

    def writer(lo: int) -> None:
        barrier.wait()
        status, _ = put_json(url, {"segments": [[lo, lo + 5]], "revision": 0})
        with lock:
            statuses.append(status)

    threads = [threading.Thread(target=writer, args=(lo,)) for lo in (10, 30)]
    for t in threads:
        t.start()
    for t in threads:
        t.join(timeout=10)
    assert sorted(statuses) == [200, 409]
    status, doc = get_json(url)
    assert status == 200 and doc["revision"] == 1


@pytest.mark.parametrize("body,field", [
    ({"segments": [[50, 40]], "revision": 0}, "segments[0]"),
    ({"segments": [[-1, 5]], "revision": 0}, "segments[0]"),
    ({"segments": [[0, N_FRAMES]], "revision": 0}, "segments[0]"),
    ({"segments": [[10, 20], [20, 30]], "revision": 0}, "segments[1]"),
    ({"segments": [[10, "x"]], "revision": 0}, "segments[0]"),
    ({"segments": "nope", "revision": 0}, "segments"),
    ({"segments": [[1, 2]]}, "revision"),
    ({"segments": [[1, 2]], "revision": -1}, "revision"),
    ({"revision": 0}, "segments"),
])
def test_put_validation_reports_the_offending_field(service, body, field):
    _, base = service
    status, doc = put_json(f"{base}/api/videos/vid0/annotations", body)
    assert status == 400
    assert doc["error"]["field"] == field
    # the rejected write must not disturb the stored record
    _, doc = get_json(f"{base}/api/videos/vid0/annotations")
    assert doc["revision"] == 0 and doc["segments"] == []


def test_overlap_message_names_both_segments(service):
    _, base = service
    status, doc = put_json(f"{base}/api/videos/vid0/annotations",
                           {"segments": [[10, 89], [80, 95]], "revision": 0})
    assert status == 400
    assert "overlaps" in doc["error"]["message"]


def test_malformed_json_body_is_field_level_400(service):
    _, base = service
    req = urllib.request.Request(
        f"{base}/api/videos/vid0/annotations", data=b"{not json",
        method="PUT", headers={"Content-Type": "application/json"})
    try:
        urllib.request.urlopen(req, timeout=10)
        raise AssertionError("expected HTTP error")
    except urllib.error.HTTPError as exc:
        with exc:
            assert exc.code == 400
            assert json.loads(exc.read())["error"]["field"] == "body"


def test_options_preflight_allows_cross_origin(service):
    _, base = service
    req = urllib.request.Request(f"{base}/api/videos", method="OPTIONS")
    with urllib.request.urlopen(req, timeout=10) as resp:
        assert resp.status == 204
        assert resp.headers["Access-Control-Allow-Origin"] == "*"
        assert "PUT" in resp.headers["Access-Control-Allow-Methods"]


def test_annotation_revisions_climb_one_per_write(service):
    _, base = service
    url = f"{base}/api/videos/vid0/annotations"
    for expected in range(3):
        status, doc = put_json(
            url, {"segments": [[expected, expected + 10]], "revision": expected})
        assert status == 200
        assert doc["revision"] == expected + 1


def test_saved_annotations_feed_eval_directly(service, capsys):
    ws, base = service
    url = f"{base}/api/videos/vid0/annotations"
    assert put_json(url, {"segments": [[10, 49], [60, 80]], "revision": 0})[0] == 200
    assert cli.main(["eval-tiou", "-w", str(ws.root), "--videos", "vid0"]) == 0
    assert "weighted mean TIoU 1.0000" in capsys.readouterr().out


def test_static_serving_with_traversal_guard(tmp_path):
    ws = Workspace(tmp_path / "ws").ensure()
    static = tmp_path / "static"
    static.mkdir()
    (static / "index.html").write_text("<html>review</html>")
    (static / "app.js").write_text("console.log('hi')")
    secret = tmp_path / "secret.txt"
    secret.write_text("keep out")
    server = annotsvc.make_server(ws, port=0, static_dir=str(static))
    thread = threading.Thread(
        target=lambda: server.serve_forever(poll_interval=0.05), daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{server.server_address[1]}"
    try:
        status, payload = http("GET", f"{base}/")
        assert status == 200 and b"review" in payload
        status, payload = http("GET", f"{base}/app.js")
        assert status == 200 and b"console" in payload
        assert http("GET", f"{base}/../secret.txt")[0] == 404
        assert http("GET", f"{base}/missing.css")[0] == 404
    finally:
        server.shutdown()
        thread.join(timeout=5)
        server.server_close()
