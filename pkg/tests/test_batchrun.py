import numpy as np
import pytest

from strokeloc import batchrun
from strokeloc.errors import InvalidConfigError

from batch_tasks import FailOnTask, WriteSizeTask
from oracles import greedy_makespan_loop


def items_from_sizes(sizes, task="hist_diffs_gray"):
    return [batchrun.WorkItem(f"v{i:03d}", s, task) for i, s in enumerate(sizes)]


# --- planning --------------------------------------------------------------

def test_work_item_validation():
    with pytest.raises(InvalidConfigError):
        batchrun.WorkItem("v", -1, "localize")
    with pytest.raises(InvalidConfigError):
        batchrun.WorkItem("v", 1, "transcode")


def test_plan_sorts_non_increasing():
    plan = batchrun.plan_batches(items_from_sizes([9, 1, 8, 2]), batch_size=50)
    assert [i.size for i in plan.items()] == [9, 8, 2, 1]
    assert plan.sorted_by_size


def test_plan_tie_break_by_video_id():
    items = [batchrun.WorkItem("b", 5, "localize"),
             batchrun.WorkItem("a", 5, "localize"),
             batchrun.WorkItem("c", 5, "localize")]
    plan = batchrun.plan_batches(items)
    assert [i.video_id for i in plan.items()] == ["a", "b", "c"]


def test_plan_unsorted_keeps_input_order():
    plan = batchrun.plan_batches(items_from_sizes([9, 1, 8, 2]),
                                 sort_by_size=False)
    assert [i.size for i in plan.items()] == [9, 1, 8, 2]
    assert not plan.sorted_by_size


def test_plan_chunking():
    plan = batchrun.plan_batches(items_from_sizes(range(120)), batch_size=50)
    assert [len(b) for b in plan.batches] == [50, 50, 20]


def test_plan_empty():
    plan = batchrun.plan_batches([])
    assert plan.batches == ()
    assert plan.items() == []


def test_plan_validation():
    with pytest.raises(InvalidConfigError):
        batchrun.plan_batches([], batch_size=0)
    with pytest.raises(InvalidConfigError):
        batchrun.plan_batches([], n_jobs=0)


def test_plan_conserves_membership():
    rng = np.random.default_rng(7)
    items = items_from_sizes(rng.integers(0, 1000, size=37).tolist())
    plan = batchrun.plan_batches(items, batch_size=10)
    assert sorted(plan.items(), key=lambda i: i.video_id) \
        == sorted(items, key=lambda i: i.video_id)


def test_plan_digest_ignores_input_order_when_sorting():
    items = items_from_sizes([5, 3, 8])
    a = batchrun.plan_batches(items)
    b = batchrun.plan_batches(list(reversed(items)))
    assert a.digest() == b.digest()
    c = batchrun.plan_batches(items, n_jobs=2)
    assert c.digest() != a.digest()


# --- schedule simulation ---------------------------------------------------

def test_simulate_table_fixtures():
    assert batchrun.simulate_schedule([9, 8, 2, 1], 2) == 10
    assert batchrun.simulate_schedule([9, 1, 8, 2], 2) == 11


def test_simulate_single_worker_sums():
    sizes = [4, 7, 1, 2]
    assert batchrun.simulate_schedule(sizes, 1) == sum(sizes)


def test_simulate_empty():
    assert batchrun.simulate_schedule([], 3) == 0.0


def test_simulate_custom_cost():
    assert batchrun.simulate_schedule([2, 3], 1, cost=lambda s: s * 10) == 50


def test_simulate_matches_loop_oracle():
    rng = np.random.default_rng(13)
    for _ in range(200):
        n = int(rng.integers(0, 20))
        sizes = rng.integers(1, 50, size=n).tolist()
        n_jobs = int(rng.integers(1, 6))
        assert batchrun.simulate_schedule(sizes, n_jobs) \
            == greedy_makespan_loop(sizes, n_jobs)


# --- execution -------------------------------------------------------------

def read_outputs(out_dir):
    return {p.name: p.read_bytes() for p in sorted(out_dir.glob("*.out"))}


def test_run_plan_outputs_independent_of_n_jobs(tmp_path):
    items = items_from_sizes([30, 10, 50, 20, 40, 60])
    outputs = {}
    for n_jobs in (1, 4):
        out_dir = tmp_path / f"jobs{n_jobs}"
        out_dir.mkdir()
        plan = batchrun.plan_batches(items, batch_size=4, n_jobs=n_jobs)
        manifest = batchrun.run_plan(plan, WriteSizeTask(out_dir))
        assert all(r["status"] == "ok" for r in manifest["items"])
        outputs[n_jobs] = read_outputs(out_dir)
    assert outputs[1] == outputs[4]


def test_run_plan_isolates_failures(tmp_path):
    items = items_from_sizes([30, 10, 50, 20, 40, 60])
    plan = batchrun.plan_batches(items, batch_size=3, n_jobs=2)
    manifest = batchrun.run_plan(plan, FailOnTask(tmp_path, "v002"))
    by_id = {r["video_id"]: r for r in manifest["items"]}
    assert by_id["v002"]["status"] == "failed"
    assert "synthetic corruption" in by_id["v002"]["error"]
    ok = [r for r in manifest["items"] if r["status"] == "ok"]
    assert len(ok) == 5
    assert len(manifest["items"]) == len(items)


def test_run_plan_empty(tmp_path):
    plan = batchrun.plan_batches([])
    manifest = batchrun.run_plan(plan, WriteSizeTask(tmp_path))
    assert manifest["items"] == []
    assert manifest["plan_digest"] == plan.digest()


def test_run_plan_skip_fn(tmp_path):
    items = items_from_sizes([5, 6, 7])
    plan = batchrun.plan_batches(items, n_jobs=1)
    manifest = batchrun.run_plan(
        plan, WriteSizeTask(tmp_path),
        skip_fn=lambda item: item.video_id == "v001")
    by_id = {r["video_id"]: r for r in manifest["items"]}
    assert by_id["v001"]["status"] == "skipped"
    assert by_id["v000"]["status"] == "ok"
    assert not (tmp_path / "v001.hist_diffs_gray.out").exists()


def test_run_plan_manifest_order_and_file(tmp_path):
    items = items_from_sizes([9, 1, 8, 2])
    plan = batchrun.plan_batches(items, n_jobs=1)
    manifest_path = tmp_path / "run.json"
    manifest = batchrun.run_plan(plan, WriteSizeTask(tmp_path),
                                 manifest_path=manifest_path)
    assert [r["video_id"] for r in manifest["items"]] \
        == [i.video_id for i in plan.items()]
    assert manifest_path.exists()
    assert manifest["plan_digest"] == plan.digest()
