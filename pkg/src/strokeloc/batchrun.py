"""Deterministic batched execution of per-video work.

Large runs process videos in batches: items are (optionally) sorted by
non-increasing file size, chunked, and each batch is fanned out over a fixed
pool of worker processes. Sorting large-first keeps the pool balanced, which
is why the schedule simulation exists: it reproduces the effect on makespan
without wall clocks, so the behavior is testable.

Task functions must be pure per video. Whatever a task writes for one video
must depend only on that video's inputs, never on worker count or timing;
run_plan checks nothing about this but the acceptance suite compares output
bytes across n_jobs values.
"""

from __future__ import annotations

import hashlib
import heapq
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .errors import InvalidConfigError, WorkspaceError

log = logging.getLogger(__name__)

MANIFEST_FORMAT_VERSION = 1

TASK_KINDS = ("hist_diffs_gray", "hist_diffs_rgb", "weighted_chi2",
              "hog_firsts", "localize")


@dataclass(frozen=True)
class WorkItem:
    video_id: str
    size: int
    task: str

    def __post_init__(self) -> None:
        if self.size < 0:
            raise InvalidConfigError(f"negative size for {self.video_id!r}")
        if self.task not in TASK_KINDS:
            raise InvalidConfigError(
                f"unknown task {self.task!r}, expected one of {TASK_KINDS}")


@dataclass(frozen=True)
class BatchPlan:
    batches: tuple[tuple[WorkItem, ...], ...]
    n_jobs: int
    sorted_by_size: bool

    def items(self) -> list[WorkItem]:
        return [item for batch in self.batches for item in batch]

    def digest(self) -> str:
        doc = {
            "n_jobs": self.n_jobs,
            "sorted": self.sorted_by_size,
            "batches": [
                [[i.video_id, i.size, i.task] for i in batch]
                for batch in self.batches
            ],
        }
        canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def plan_batches(items: Iterable[WorkItem], batch_size: int = 50,
                 n_jobs: int = 10, sort_by_size: bool = True) -> BatchPlan:
    """Chunk work items into batches, largest videos first when sorting.

    Ties in size break on video_id so the plan never depends on input order.
    """
    if batch_size < 1:
        raise InvalidConfigError(f"batch_size must be >= 1, got {batch_size}")
    if n_jobs < 1:
        raise InvalidConfigError(f"n_jobs must be >= 1, got {n_jobs}")
    ordered = list(items)
    if sort_by_size:
        ordered.sort(key=lambda i: (-i.size, i.video_id))
    batches = tuple(
        tuple(ordered[i:i + batch_size])
        for i in range(0, len(ordered), batch_size)
    )
    return BatchPlan(batches=batches, n_jobs=n_jobs, sorted_by_size=sort_by_size)


def simulate_schedule(sizes: Sequence[float], n_jobs: int,
                      cost: Callable[[float], float] = lambda s: s) -> float:
    """Makespan of greedy idle-first dispatch over n_jobs workers.

    The next item always goes to the worker that frees up first; ties go to
    the lowest worker index (heap order). This mirrors how a process pool
    hands out queued items.
    """
    if n_jobs < 1:
        raise InvalidConfigError(f"n_jobs must be >= 1, got {n_jobs}")
    free = [(0.0, w) for w in range(n_jobs)]
    heapq.heapify(free)
    makespan = 0.0
    for size in sizes:
        t, w = heapq.heappop(free)
        t += cost(size)
        makespan = max(makespan, t)
        heapq.heappush(free, (t, w))
    return makespan


def _execute(task_fn: Callable[[WorkItem], str], item: WorkItem) -> dict:
    started = time.perf_counter()
    try:
        output = task_fn(item)
        status, error = "ok", None
    except Exception as exc:  # a bad video must not sink the batch
        output, status, error = None, "failed", f"{type(exc).__name__}: {exc}"
    duration_ms = (time.perf_counter() - started) * 1000.0
    record = {
        "video_id": item.video_id,
        "task": item.task,
        "status": status,
        "duration_ms": round(duration_ms, 3),
        "output_path": output,
    }
    if error is not None:
        record["error"] = error
    return record


def run_plan(plan: BatchPlan, task_fn: Callable[[WorkItem], str],
             skip_fn: Callable[[WorkItem], bool] | None = None,
             manifest_path: Path | str | None = None) -> dict:
    """Execute a plan batch by batch and return the run manifest.

    task_fn(item) does the actual per-video work and returns the path it
    wrote. skip_fn marks items to record as "skipped" without running
    (resume support). Failures are caught per item; the manifest always
    holds exactly one terminal record per planned item, in plan order.
    """
    records_by_id: dict[tuple[str, str], dict] = {}
    for batch_index, batch in enumerate(plan.batches):
        to_run = []
        for item in batch:
            if skip_fn is not None and skip_fn(item):
                records_by_id[(item.video_id, item.task)] = {
                    "video_id": item.video_id, "task": item.task,
                    "status": "skipped", "duration_ms": 0.0,
                    "output_path": None,
                }
            else:
                to_run.append(item)
        if to_run:
            log.info("batch %d/%d: running %d of %d items on %d workers",
                     batch_index + 1, len(plan.batches), len(to_run),
                     len(batch), plan.n_jobs)
        if not to_run:
            continue
        if plan.n_jobs == 1:
            results = [_execute(task_fn, item) for item in to_run]
        else:
            with ProcessPoolExecutor(max_workers=plan.n_jobs) as pool:
                results = list(pool.map(_execute,
                                        [task_fn] * len(to_run), to_run))
        for record in results:
            records_by_id[(record["video_id"], record["task"])] = record
    ordered = [records_by_id[(i.video_id, i.task)] for i in plan.items()]
    manifest = {
        "format_version": MANIFEST_FORMAT_VERSION,
        "plan_digest": plan.digest(),
        "n_jobs": plan.n_jobs,
        "items": ordered,
    }
    if manifest_path is not None:
        try:
            Path(manifest_path).write_text(
                json.dumps(manifest, sort_keys=True, indent=2) + "\n")
        except OSError as exc:
            raise WorkspaceError(
                f"cannot write run manifest to {manifest_path}: {exc}") from exc
    return manifest
