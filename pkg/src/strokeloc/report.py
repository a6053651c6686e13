"""Report artifacts: JSON summaries, the delimiter-separated sweep curve,
and the rendered figure behind it.

The curve file is two tab-separated columns under a single header line;
floats are written with repr so they parse back to the exact same values.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import NotFoundError, StreamFormatError

SWEEP_FORMAT_VERSION = 1
PLOT_DATA_HEADER = "T\tweighted_tiou"


def write_json_report(path, doc: dict) -> None:
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def read_json_report(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise NotFoundError(f"missing report {path}")
    return json.loads(path.read_text())


def write_sweep_report(path, rows) -> None:
    doc = {
        "format_version": SWEEP_FORMAT_VERSION,
        "rows": [{"T": int(t), "weighted_tiou": float(v)} for t, v in rows],
    }
    write_json_report(path, doc)


def load_sweep_rows(path) -> list[tuple[int, float]]:
    """Rows of an existing sweep report; an absent or empty report is a
    not-found condition because there is no curve to draw."""
    doc = read_json_report(path)
    rows = [(int(r["T"]), float(r["weighted_tiou"])) for r in doc.get("rows", [])]
    if not rows:
        raise NotFoundError(f"sweep report {path} has no rows")
    return rows


def write_plot_data(path, rows) -> None:
    lines = [PLOT_DATA_HEADER]
    lines += [f"{int(t)}\t{float(v)!r}" for t, v in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def read_plot_data(path) -> list[tuple[int, float]]:
    path = Path(path)
    if not path.exists():
        raise NotFoundError(f"missing curve file {path}")
    lines = path.read_text().splitlines()
    if not lines or lines[0] != PLOT_DATA_HEADER:
        raise StreamFormatError(f"bad curve header in {path}")
    rows = []
    for line in lines[1:]:
        if not line.strip():
            continue
        t, v = line.split("\t")
        rows.append((int(t), float(v)))
    return rows


def render_sweep_figure(path, rows) -> None:
    """Render the threshold curve to a PNG.

    The writer's Software tag is stripped so the same rows always produce
    the same bytes; reports must be reproducible like every other artifact.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ts = [t for t, _ in rows]
    vs = [v for _, v in rows]
    fig, ax = plt.subplots(figsize=(6.4, 4.0), dpi=100)
    ax.plot(ts, vs, marker="o", color="#1f6f8b")
    ax.set_xlabel("minimum segment length T (frames)")
    ax.set_ylabel("weighted mean TIoU")
    ax.set_xticks(ts)
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="png", metadata={"Software": None})
    plt.close(fig)
