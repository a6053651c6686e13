"""Command-line front end: one subcommand per pipeline stage, every artifact
under a single workspace directory.

Stage order for a full run: synth (or preprocess) -> extract --feature gray
-> train-sbd -> detect-cuts -> train-cam --which cam1/cam2 -> localize ->
filter / eval-sbd / eval-tiou / sweep. Each stage only reads artifacts of
earlier stages, so any stage can be re-run alone.
"""

from __future__ import annotations

import argparse
import logging
import shlex
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import batchrun, features, ingest, report
from .errors import InvalidConfigError, NotFoundError, StrokelocError
from .evalkit import SegmentSet, aggregate_cut_reports, build_tiou_report, eval_cuts
from .learners import (
    RfConfig,
    SvmConfig,
    load_model,
    rf_predict_batch,
    save_model,
    svm_margin_batch,
    train_rf,
    train_svm,
)
from .pipeline import (
    CutList,
    LocalizeOptions,
    build_cam_dataset,
    cuts_from_json,
    cuts_to_json,
    detect_cuts,
    filter_segments,
    localize_strokes,
    segments_from_json,
    segments_to_json,
    sweep_filter,
)
from .synthcorpus import CorpusSpec, generate_corpus, load_manifest, manifest_digest
from .workspace import Workspace, resolve_workspace

log = logging.getLogger(__name__)

DEFAULT_SEED = 42

# CLI feature names to the diff kinds and batch task kinds they select.
DIFF_FEATURES = {"gray": "gray_hist", "rgb": "rgb_hist", "chi2": "weighted_chi2"}
TASK_FOR_FEATURE = {
    "gray": "hist_diffs_gray",
    "rgb": "hist_diffs_rgb",
    "chi2": "weighted_chi2",
    "hog": "hog_firsts",
}


# --- helpers ----------------------------------------------------------------

def parse_t_list(text: str) -> list[int]:
    """Parse a threshold list like "0,10,...,100".

    A "..." token continues the arithmetic progression set by the two values
    before it, up to the value after it. Values must be non-negative and
    strictly increasing.
    """
    tokens = [t.strip() for t in text.split(",") if t.strip()]
    values: list[int] = []
    pending_fill = False
    for token in tokens:
        if token == "...":
            if pending_fill:
                raise InvalidConfigError("repeated '...' in threshold list")
            pending_fill = True
            continue
        try:
            value = int(token)
        except ValueError:
            raise InvalidConfigError(f"bad threshold {token!r}") from None
        if pending_fill:
            if len(values) < 2:
                raise InvalidConfigError("'...' needs two values before it")
            step = values[-1] - values[-2]
            if step <= 0 or (value - values[-1]) % step != 0 or value <= values[-1]:
                raise InvalidConfigError(
                    f"cannot continue step {step} from {values[-1]} to {value}")
            values.extend(range(values[-1] + step, value, step))
            pending_fill = False
        values.append(value)
    if pending_fill:
        raise InvalidConfigError("trailing '...' in threshold list")
    if not values:
        raise InvalidConfigError("empty threshold list")
    for a, b in zip(values, values[1:]):
        if b <= a:
            raise InvalidConfigError(f"thresholds must increase, got {a} then {b}")
    if values[0] < 0:
        raise InvalidConfigError(f"thresholds must be >= 0, got {values[0]}")
    return values


def split_ids(ids: Sequence[str], train_frac: float) -> tuple[list[str], list[str]]:
    """Deterministic train/held split: ids sorted, the first chunk trains."""
    if not 0 < train_frac <= 1:
        raise InvalidConfigError(f"train_frac must be in (0, 1], got {train_frac}")
    ordered = sorted(ids)
    n_train = int(round(train_frac * len(ordered)))
    if train_frac < 1:
        n_train = min(max(n_train, 1), max(len(ordered) - 1, 0))
    return ordered[:n_train], ordered[n_train:]


def _workspace(args) -> Workspace:
    return resolve_workspace(getattr(args, "workspace", None)).ensure()


def _select_ids(ws: Workspace, args) -> list[str]:
    all_ids = ws.video_ids()
    if not all_ids:
        raise NotFoundError(f"no videos under {ws.videos}")
    explicit = getattr(args, "videos", None)
    if explicit:
        chosen = sorted(v.strip() for v in explicit.split(",") if v.strip())
        unknown = [v for v in chosen if v not in set(all_ids)]
        if unknown:
            raise NotFoundError(f"unknown video ids: {', '.join(unknown)}")
        return chosen
    split = getattr(args, "split", "all")
    if split == "all":
        return all_ids
    train, held = split_ids(all_ids, getattr(args, "train_frac", 0.7))
    return train if split == "train" else held


def _read_pred_cuts(ws: Workspace, video_id: str) -> CutList:
    path = ws.require(ws.pred_cuts_path(video_id), "run detect-cuts first")
    return cuts_from_json(path.read_text())


def _read_gt_cuts(ws: Workspace, video_id: str) -> CutList:
    path = ws.require(ws.gt_cuts_path(video_id), "no cut annotations for this video")
    return cuts_from_json(path.read_text())


def _read_segments(ws: Workspace, path: Path):
    ws.require(path, "run localize first")
    _, segments = segments_from_json(path.read_text())
    return segments


def _shot_classes(ws: Workspace) -> dict[str, list[tuple[int, str]]]:
    """Per-video (shot start, class) labels from the corpus manifest; the
    stand-in for hand-labeled first frames."""
    ws.require(ws.corpus_manifest_path(),
               "camera training labels come from a generated corpus")
    manifest = load_manifest(ws.root)
    return {
        entry["video_id"]: [(int(s), str(c)) for s, c in entry["shot_classes"]]
        for entry in manifest["videos"]
    }


def _print_run_summary(name: str, manifest: dict) -> int:
    counts = {"ok": 0, "skipped": 0, "failed": 0}
    for record in manifest["items"]:
        counts[record["status"]] += 1
        if record["status"] == "failed":
            print(f"{name}: {record['video_id']} failed: {record['error']}",
                  file=sys.stderr)
    print(f"{name}: {counts['ok']} ok, {counts['skipped']} skipped, "
          f"{counts['failed']} failed")
    return 1 if counts["failed"] else 0


# --- batch task callables (must be picklable, hence module level) -----------

class DiffsTask:
    """Per-video difference series extraction for the worker pool."""

    def __init__(self, root: str, kind: str, n_bins: int) -> None:
        self.root = root
        self.kind = kind
        self.n_bins = n_bins

    def __call__(self, item: batchrun.WorkItem) -> str:
        ws = Workspace(Path(self.root))
        with ingest.open_gry(ws.video_path(item.video_id)) as source:
            series = features.diff_series(source, kind=self.kind, n_bins=self.n_bins)
        out = ws.diffs_path(item.video_id, self.kind)
        features.write_diff_series(out, series)
        return str(out.relative_to(ws.root))


class HogFirstsTask:
    """HOG descriptors of a video's shot first frames (frame 0 plus every
    predicted cut), written as one block per video."""

    def __init__(self, root: str) -> None:
        self.root = root

    def __call__(self, item: batchrun.WorkItem) -> str:
        ws = Workspace(Path(self.root))
        cuts = _read_pred_cuts(ws, item.video_id)
        positions = sorted({0, *cuts.cuts})
        with ingest.open_gry(ws.video_path(item.video_id)) as source:
            block = [features.hog(source.read_frame(i)) for i in positions]
        out = ws.hog_path(item.video_id)
        features.write_hog_block(out, block)
        return str(out.relative_to(ws.root))


class LocalizeTask:
    """Per-video stroke localization for the worker pool; each worker loads
    the two camera models from the workspace."""

    def __init__(self, root: str, opts: LocalizeOptions) -> None:
        self.root = root
        self.opts = opts

    def __call__(self, item: batchrun.WorkItem) -> str:
        ws = Workspace(Path(self.root))
        cuts = _read_pred_cuts(ws, item.video_id)
        cam1 = load_model(ws.require(ws.model_path("cam1_svm"),
                                     "run train-cam --which cam1 first"))
        cam2 = load_model(ws.require(ws.model_path("cam2_svm"),
                                     "run train-cam --which cam2 first"))
        with ingest.open_gry(ws.video_path(item.video_id)) as source:
            segments = localize_strokes(source, cuts, cam1, cam2, opts=self.opts)
        out = ws.pred_segments_path(item.video_id)
        out.write_text(segments_to_json(item.video_id, segments))
        return str(out.relative_to(ws.root))


def _run_batch(ws: Workspace, args, task_kind: str, task_fn, skip_fn) -> int:
    ids = _select_ids(ws, args)
    items = [
        batchrun.WorkItem(vid, size=ws.video_path(vid).stat().st_size, task=task_kind)
        for vid in ids
    ]
    plan = batchrun.plan_batches(items, batch_size=args.batch_size,
                                 n_jobs=args.jobs, sort_by_size=args.sorted)
    manifest = batchrun.run_plan(
        plan, task_fn, skip_fn=skip_fn if args.resume else None,
        manifest_path=ws.report_path(f"{task_kind}.run.json"))
    return _print_run_summary(task_kind, manifest)


# --- subcommands ------------------------------------------------------------

def cmd_synth(args) -> int:
    ws = _workspace(args)
    spec = CorpusSpec(n_videos=args.count, frames_per_video=args.frames,
                      width=args.width, height=args.height,
                      noise_level=args.noise, seed=args.seed)
    manifest = generate_corpus(spec, ws.root)
    digest = manifest_digest(manifest)
    print(f"synth: wrote {len(manifest['videos'])} videos under {ws.root} "
          f"(manifest digest {digest[:12]})")
    return 0


def cmd_preprocess(args) -> int:
    ws = _workspace(args)
    for src in args.sources:
        src_path = Path(src)
        if not src_path.exists():
            raise NotFoundError(f"missing source video {src_path}")
        target = ingest.VideoMeta(src_path.stem, width=args.width,
                                  height=args.height, fps=args.fps)
        command = ingest.plan_decode(str(src_path), target, decoder=args.decoder)
        out = ws.video_path(target.video_id)
        if args.run:
            meta = ingest.run_decode(command, out)
            print(f"{meta.video_id}: {meta.n_frames} frames -> "
                  f"videos/{meta.video_id}.gry")
        else:
            print(f"{shlex.join(command.argv)} -> videos/{target.video_id}.gry")
    return 0


def cmd_extract(args) -> int:
    ws = _workspace(args)
    task_kind = TASK_FOR_FEATURE[args.feature]
    if args.feature == "hog":
        task_fn = HogFirstsTask(str(ws.root))

        def skip_fn(item: batchrun.WorkItem) -> bool:
            try:
                features.read_hog_block(ws.hog_path(item.video_id))
                return True
            except Exception:
                return False
    else:
        kind = DIFF_FEATURES[args.feature]
        task_fn = DiffsTask(str(ws.root), kind, args.bins)

        def skip_fn(item: batchrun.WorkItem) -> bool:
            try:
                series = features.read_diff_series(ws.diffs_path(item.video_id, kind))
                return series.kind == kind and series.n_bins == args.bins
            except Exception:
                return False
    return _run_batch(ws, args, task_kind, task_fn, skip_fn)


def cmd_train_sbd(args) -> int:
    ws = _workspace(args)
    ids = _select_ids(ws, args)
    kind = DIFF_FEATURES[args.feature]
    columns = []
    labels = []
    for vid in ids:
        path = ws.require(ws.diffs_path(vid, kind),
                          f"run extract --feature {args.feature} first")
        series = features.read_diff_series(path)
        meta = ingest.read_gry_meta(ws.video_path(vid))
        gt = _read_gt_cuts(ws, vid)
        y = np.zeros(len(series.values), dtype=np.int64)
        y[[c - 1 for c in gt.cuts]] = 1
        columns.append(np.asarray(series.values) / meta.pixel_count)
        labels.append(y)
    x = np.concatenate(columns).reshape(-1, 1)
    y = np.concatenate(labels)
    cfg = RfConfig(n_trees=args.trees, max_depth=args.depth,
                   min_leaf=args.min_leaf, seed=args.seed)
    model = train_rf(x, y, cfg)
    save_model(model, ws.model_path("sbd_rf"))
    predicted, _ = rf_predict_batch(model, x)
    accuracy = float(np.mean(predicted == y))
    print(f"train-sbd: {len(y)} pairs from {len(ids)} videos, "
          f"train accuracy {accuracy:.4f} -> models/sbd_rf.json")
    return 0


def cmd_detect_cuts(args) -> int:
    ws = _workspace(args)
    ids = _select_ids(ws, args)
    kind = DIFF_FEATURES[args.feature]
    model = load_model(ws.require(ws.model_path("sbd_rf"), "run train-sbd first"))
    total = 0
    for vid in ids:
        path = ws.require(ws.diffs_path(vid, kind),
                          f"run extract --feature {args.feature} first")
        series = features.read_diff_series(path)
        meta = ingest.read_gry_meta(ws.video_path(vid))
        cut_list = detect_cuts(series, model, meta.pixel_count)
        ws.pred_cuts_path(vid).write_text(cuts_to_json(cut_list))
        total += len(cut_list)
    print(f"detect-cuts: {total} cuts across {len(ids)} videos")
    return 0


def cmd_train_cam(args) -> int:
    ws = _workspace(args)
    ids = _select_ids(ws, args)
    classes = _shot_classes(ws)
    target_cls = {"cam1": "A", "cam2": "B"}[args.which]
    missing = [vid for vid in ids if vid not in classes]
    if missing:
        raise NotFoundError(f"no shot class labels for: {', '.join(missing)}")
    sources = []
    try:
        cut_lists = []
        positives = {}
        for vid in ids:
            sources.append(ingest.open_gry(ws.video_path(vid)))
            cut_lists.append(_read_gt_cuts(ws, vid))
            positives[vid] = {s for s, c in classes[vid] if c == target_cls}
        x, y = build_cam_dataset(sources, cut_lists, positives)
    finally:
        for source in sources:
            source.close()
    cfg = SvmConfig(lam=args.lam, epochs=args.epochs, seed=args.seed)
    model = train_svm(x, y, cfg)
    save_model(model, ws.model_path(f"{args.which}_svm"))
    predicted = (svm_margin_batch(model, x) >= 0).astype(np.int64)
    accuracy = float(np.mean(predicted == y))
    print(f"train-cam: {args.which} on {len(y)} first frames "
          f"({int(y.sum())} positive), train accuracy {accuracy:.4f} "
          f"-> models/{args.which}_svm.json")
    return 0


def cmd_localize(args) -> int:
    ws = _workspace(args)
    opts = LocalizeOptions(first_k=args.first_k, min_votes=args.min_votes,
                           close_trailing=args.close_trailing,
                           prepend_zero=args.prepend_zero)
    ws.require(ws.model_path("cam1_svm"), "run train-cam --which cam1 first")
    ws.require(ws.model_path("cam2_svm"), "run train-cam --which cam2 first")
    task_fn = LocalizeTask(str(ws.root), opts)

    def skip_fn(item: batchrun.WorkItem) -> bool:
        try:
            segments_from_json(ws.pred_segments_path(item.video_id).read_text())
            return True
        except Exception:
            return False

    return _run_batch(ws, args, "localize", task_fn, skip_fn)


def cmd_filter(args) -> int:
    ws = _workspace(args)
    ids = _select_ids(ws, args)
    kept_total = 0
    seen_total = 0
    for vid in ids:
        segments = _read_segments(ws, ws.pred_segments_path(vid))
        kept = filter_segments(segments, args.T)
        ws.pred_segments_path(vid, T=args.T).write_text(
            segments_to_json(vid, kept))
        kept_total += len(kept)
        seen_total += len(segments)
    print(f"filter: T={args.T} kept {kept_total} of {seen_total} segments "
          f"across {len(ids)} videos")
    return 0


def cmd_eval_sbd(args) -> int:
    ws = _workspace(args)
    ids = _select_ids(ws, args)
    per_video = {}
    reports = []
    for vid in ids:
        result = eval_cuts(_read_pred_cuts(ws, vid), _read_gt_cuts(ws, vid),
                           tolerance=args.tolerance)
        per_video[vid] = result.as_dict()
        reports.append(result)
    overall = aggregate_cut_reports(reports)
    report.write_json_report(ws.report_path("sbd_eval.json"), {
        "format_version": 1,
        "tolerance": args.tolerance,
        "per_video": per_video,
        "overall": overall.as_dict(),
    })
    print(f"eval-sbd: precision {overall.precision:.4f} recall "
          f"{overall.recall:.4f} F {overall.f_score:.4f} "
          f"({len(ids)} videos, tolerance {args.tolerance})")
    return 0


def cmd_eval_tiou(args) -> int:
    ws = _workspace(args)
    ids = _select_ids(ws, args)
    preds = []
    gts = []
    for vid in ids:
        pred_path = ws.pred_segments_path(vid, T=args.T)
        preds.append(SegmentSet(vid, [
            (s.start, s.end) for s in _read_segments(ws, pred_path)]))
        gt_path = ws.require(ws.gt_segments_path(vid),
                             "no segment annotations for this video")
        gts.append(SegmentSet(vid, [
            (s.start, s.end) for s in _read_segments(ws, gt_path)]))
    tiou = build_tiou_report(preds, gts)
    doc = {"format_version": 1, "T": args.T}
    doc.update(tiou.as_dict())
    report.write_json_report(ws.report_path("tiou_eval.json"), doc)
    print(f"eval-tiou: weighted mean TIoU {tiou.weighted_mean:.4f} "
          f"over {tiou.n_videos} videos"
          + (f" (filtered at T={args.T})" if args.T is not None else ""))
    return 0


def cmd_sweep(args) -> int:
    ws = _workspace(args)
    ids = _select_ids(ws, args)
    pred_by_video = {}
    gt_by_video = {}
    for vid in ids:
        pred_by_video[vid] = _read_segments(ws, ws.pred_segments_path(vid))
        gt_path = ws.require(ws.gt_segments_path(vid),
                             "no segment annotations for this video")
        gt_by_video[vid] = _read_segments(ws, gt_path)
    rows = sweep_filter(pred_by_video, gt_by_video, args.T_list)
    report.write_sweep_report(ws.report_path("sweep.json"), rows)
    saved = report.load_sweep_rows(ws.report_path("sweep.json"))
    report.write_plot_data(ws.report_path("sweep.tsv"), saved)
    report.render_sweep_figure(ws.report_path("sweep.png"), saved)
    print("T\tweighted_tiou")
    for t, v in rows:
        print(f"{t}\t{v:.6f}")
    return 0


def cmd_serve(args) -> int:
    from . import annotsvc

    ws = _workspace(args)
    server = annotsvc.make_server(ws, host=args.host, port=args.port,
                                  static_dir=args.static)
    host, port = server.server_address[:2]
    print(f"serve: listening on http://{host}:{port}/ (workspace {ws.root})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


# --- parser -----------------------------------------------------------------

def _workspace_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("-w", "--workspace", default=None, metavar="DIR",
                        help="workspace root (default: $STROKELOC_WORKSPACE "
                             "or the current directory)")
    return parent


def _selection_parent(default_split: str = "all") -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--videos", default=None, metavar="IDS",
                        help="comma-separated video ids (overrides --split)")
    parent.add_argument("--split", choices=("all", "train", "held"),
                        default=default_split,
                        help=f"video subset to use (default: {default_split})")
    parent.add_argument("--train-frac", type=float, default=0.7, metavar="F",
                        help="fraction of videos (sorted by id) in the train "
                             "split (default: 0.7)")
    return parent


def _batch_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--batch-size", type=int, default=50, metavar="N",
                     help="videos per batch (default: 50)")
    sub.add_argument("--jobs", type=int, default=10, metavar="N",
                     help="worker processes (default: 10)")
    sub.add_argument("--sorted", action=argparse.BooleanOptionalAction,
                     default=True,
                     help="process largest videos first (default: on)")
    sub.add_argument("--resume", action="store_true",
                     help="skip videos whose output already parses")


def _t_list_flag(text: str) -> list[int]:
    try:
        return parse_t_list(text)
    except StrokelocError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="strokeloc",
        description="Cricket stroke localization: shot boundary detection, "
                    "camera classification, and segment evaluation over a "
                    "workspace directory.")
    ws_p = _workspace_parent()
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("synth", parents=[ws_p],
                       help="generate the synthetic labeled corpus")
    p.add_argument("--count", type=int, default=20, metavar="N",
                   help="number of videos (default: 20)")
    p.add_argument("--frames", type=int, default=3000, metavar="N",
                   help="frames per video (default: 3000)")
    p.add_argument("--width", type=int, default=64)
    p.add_argument("--height", type=int, default=64)
    p.add_argument("--noise", type=float, default=1.5,
                   help="per-frame noise level (default: 1.5)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("preprocess", parents=[ws_p],
                       help="plan or run decoder commands for source videos")
    p.add_argument("sources", nargs="+", metavar="VIDEO",
                   help="source video files")
    p.add_argument("--width", type=int, default=640)
    p.add_argument("--height", type=int, default=360)
    p.add_argument("--fps", type=int, default=25)
    p.add_argument("--decoder", default="ffmpeg",
                   help="decoder executable (default: ffmpeg)")
    p.add_argument("--run", action="store_true",
                   help="execute the plans instead of printing them")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("extract", parents=[ws_p, _selection_parent()],
                       help="extract difference series or shot-first-frame "
                            "HOG blocks")
    p.add_argument("--feature", choices=("gray", "rgb", "chi2", "hog"),
                   required=True)
    p.add_argument("--bins", type=int, default=256,
                   help="histogram bins for difference features (default: 256)")
    _batch_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train-sbd", parents=[ws_p, _selection_parent("train")],
                       help="train the cut detector on annotated videos")
    p.add_argument("--feature", choices=("gray", "rgb", "chi2"), default="gray")
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--min-leaf", type=int, default=2)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_train_sbd)

    p = sub.add_parser("detect-cuts", parents=[ws_p, _selection_parent()],
                       help="predict cuts with the trained detector")
    p.add_argument("--feature", choices=("gray", "rgb", "chi2"), default="gray")
    p.set_defaults(func=cmd_detect_cuts)

    p = sub.add_parser("train-cam", parents=[ws_p, _selection_parent("train")],
                       help="train a camera-class first-frame classifier")
    p.add_argument("--which", choices=("cam1", "cam2"), required=True)
    p.add_argument("--lam", type=float, default=1e-4,
                   help="regularization strength (default: 1e-4)")
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_train_cam)

    p = sub.add_parser("localize", parents=[ws_p, _selection_parent()],
                       help="turn predicted cuts into stroke segments")
    p.add_argument("--first-k", type=int, default=1, metavar="K",
                   help="frames per shot to vote over (default: 1)")
    p.add_argument("--min-votes", type=int, default=1, metavar="N",
                   help="positive votes needed (default: 1)")
    p.add_argument("--close-trailing", action="store_true",
                   help="close a segment still open at the last frame")
    p.add_argument("--prepend-zero", action="store_true",
                   help="treat frame 0 as a shot start")
    _batch_flags(p)
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("filter", parents=[ws_p, _selection_parent()],
                       help="drop segments shorter than T frames")
    p.add_argument("--T", type=int, default=60,
                   help="minimum segment length (default: 60)")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("eval-sbd", parents=[ws_p, _selection_parent()],
                       help="score predicted cuts against annotations")
    p.add_argument("--tolerance", type=int, default=0,
                   help="match window in frames (default: 0)")
    p.set_defaults(func=cmd_eval_sbd)

    p = sub.add_parser("eval-tiou", parents=[ws_p, _selection_parent()],
                       help="score predicted segments against annotations")
    p.add_argument("--T", type=int, default=None,
                   help="evaluate the filtered predictions for this T")
    p.set_defaults(func=cmd_eval_tiou)

    p = sub.add_parser("sweep", parents=[ws_p, _selection_parent()],
                       help="weighted TIoU across filter thresholds, with "
                            "table, curve file, and figure")
    p.add_argument("--T-list", dest="T_list", type=_t_list_flag,
                   default="0,10,...,100", metavar="LIST",
                   help='thresholds, e.g. "0,10,...,100" (default)')
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("serve", parents=[ws_p],
                       help="serve frames, predictions, and annotations "
                            "over HTTP")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--static", default=None, metavar="DIR",
                   help="also serve this directory at / (the review UI)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    if not argv:
        parser.print_help(sys.stderr)
        return 2
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    if not hasattr(args, "func"):
        parser.print_help(sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
    logging.getLogger("PIL").setLevel(logging.WARNING)
    try:
        return args.func(args)
    except StrokelocError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
