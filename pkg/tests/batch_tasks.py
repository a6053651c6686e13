"""Module-level task functions for batchrun tests (worker processes need
importable callables)."""

from pathlib import Path

_OUT_DIR = {"path": None}


def configure(out_dir):
    _OUT_DIR["path"] = str(out_dir)


class WriteSizeTask:
    """Writes a deterministic payload derived from the item."""

    def __init__(self, out_dir):
        self.out_dir = str(out_dir)

    def __call__(self, item):
        path = Path(self.out_dir) / f"{item.video_id}.{item.task}.out"
        payload = f"{item.video_id}:{item.task}:{item.size * 3 + 1}\n"
        path.write_text(payload)
        return str(path)


class FailOnTask(WriteSizeTask):
    """Raises for one chosen video id, succeeds elsewhere."""

    def __init__(self, out_dir, bad_id):
        super().__init__(out_dir)
        self.bad_id = bad_id

    def __call__(self, item):
        if item.video_id == self.bad_id:
            raise ValueError(f"synthetic corruption in {item.video_id}")
        return super().__call__(item)
