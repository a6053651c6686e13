"""From-scratch supervised models for the stroke localization pipeline.

Two model families, both deterministic under a seed and serializable to a
versioned text format:

* a random forest over scalar histogram-difference features, used to decide
  whether a frame pair straddles a shot boundary, and
* a linear SVM trained with the Pegasos subgradient schedule, used to label
  the first frame of a shot by camera view.

Nothing here depends on the rest of the package; training inputs are plain
numpy arrays.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, replace
from typing import IO, Sequence, Union

import numpy as np

from .errors import (
    DegenerateDataError,
    EmptyDataError,
    LabelError,
    ModelParseError,
    ModelVersionError,
    ShapeError,
)

MODEL_FORMAT_VERSION = 1

PathOrFile = Union[str, "os.PathLike[str]", IO[str]]


@dataclass(frozen=True)
class RfConfig:
    """Random forest hyperparameters.

    ``mtry=None`` means ceil(sqrt(n_features)), resolved when training starts
    and echoed back as a concrete number in the trained model.
    """

    n_trees: int = 100
    max_depth: int = 8
    min_leaf: int = 2
    mtry: int | None = None
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_trees <= 0 or self.max_depth <= 0 or self.min_leaf <= 0:
            raise ValueError("n_trees, max_depth and min_leaf must be positive")
        if self.mtry is not None and self.mtry <= 0:
            raise ValueError("mtry must be positive when given")


@dataclass(frozen=True)
class SvmConfig:
    """Linear SVM hyperparameters for the Pegasos solver."""

    lam: float = 1e-4
    epochs: int = 50
    seed: int = 0

    def __post_init__(self) -> None:
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if self.epochs <= 0:
            raise ValueError("epochs must be positive")


@dataclass(frozen=True)
class TrainConfig:
    rf: RfConfig = RfConfig()
    svm: SvmConfig = SvmConfig()


class Tree:
    """One grown decision tree, stored as flat parallel node arrays.

    ``feature[i] < 0`` marks node i as a leaf; internal nodes route a sample
    left when ``x[feature[i]] <= threshold[i]``.  Leaves keep the training
    class counts so the tree's vote stays inspectable after serialization.
    """

    __slots__ = ("feature", "threshold", "left", "right", "count0", "count1")

    def __init__(self, feature, threshold, left, right, count0, count1):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.count0 = np.asarray(count0, dtype=np.int64)
        self.count1 = np.asarray(count1, dtype=np.int64)

    def votes(self, x: np.ndarray) -> np.ndarray:
        """Class votes (0/1) for each row of x. Ties in leaf counts go to 1."""
        node = np.zeros(x.shape[0], dtype=np.int64)
        while True:
            feat = self.feature[node]
            active = feat >= 0
            if not active.any():
                break
            rows = np.flatnonzero(active)
            vals = x[rows, feat[rows]]
            go_left = vals <= self.threshold[node[rows]]
            node[rows] = np.where(go_left, self.left[node[rows]], self.right[node[rows]])
        return (self.count1[node] >= self.count0[node]).astype(np.int64)


@dataclass(frozen=True)
class RandomForestModel:
    trees: tuple[Tree, ...]
    n_features: int
    config: RfConfig


@dataclass(frozen=True)
class LinearSvmModel:
    """Weights include the bias as the last entry (appended constant-1 input)."""

    weights: np.ndarray
    config: SvmConfig
    objective_trace: tuple[float, ...] | None = None


def _check_training_data(samples, labels):
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim == 1:
        samples = samples.reshape(-1, 1)
    if samples.ndim != 2:
        raise ShapeError(f"samples must be a 2-D matrix, got ndim={samples.ndim}")
    labels = np.asarray(labels)
    if samples.shape[0] == 0:
        raise EmptyDataError("cannot train on an empty sample set")
    if labels.shape != (samples.shape[0],):
        raise ShapeError(
            f"labels shape {labels.shape} does not match {samples.shape[0]} samples")
    if not np.isin(labels, (0, 1)).all():
        raise LabelError("labels must all be 0 or 1")
    return samples, labels.astype(np.int64)


# --- random forest ---------------------------------------------------------

def _best_split(col: np.ndarray, labels: np.ndarray, min_leaf: int):
    """Best midpoint threshold for one feature column, or None.

    Score is the size-weighted Gini impurity of the two children, written as
    nl - (c0l^2 + c1l^2)/nl  +  nr - (c0r^2 + c1r^2)/nr
    (the shared 1/n factor cannot change the argmin, so it is dropped).
    Candidates sit halfway between consecutive distinct sorted values, and
    np.argmin keeps the first minimum, i.e. the lowest threshold.
    """
    order = np.argsort(col, kind="stable")
    xs = col[order]
    ys = labels[order]
    n = xs.shape[0]
    # boundary k splits into sorted prefix [0..k] and suffix [k+1..]
    boundaries = np.flatnonzero(xs[:-1] != xs[1:])
    if boundaries.size == 0:
        return None
    nl = boundaries + 1
    nr = n - nl
    keep = (nl >= min_leaf) & (nr >= min_leaf)
    boundaries = boundaries[keep]
    if boundaries.size == 0:
        return None
    nl = nl[keep]
    nr = nr[keep]
    cum1 = np.cumsum(ys)
    c1l = cum1[boundaries]
    c0l = nl - c1l
    c1r = cum1[-1] - c1l
    c0r = nr - c1r
    score = (nl - (c0l * c0l + c1l * c1l) / nl) + (nr - (c0r * c0r + c1r * c1r) / nr)
    k = int(np.argmin(score))
    b = boundaries[k]
    threshold = (xs[b] + xs[b + 1]) / 2.0
    return float(score[k]), float(threshold)


def _grow_tree(samples: np.ndarray, labels: np.ndarray, cfg: RfConfig,
               mtry: int, rng: np.random.Generator) -> Tree:
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    count0: list[int] = []
    count1: list[int] = []

    def add_node():
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        count0.append(0)
        count1.append(0)
        return len(feature) - 1

    d = samples.shape[1]

    def grow(idx: np.ndarray, depth: int) -> int:
        node = add_node()
        ys = labels[idx]
        c1 = int(ys.sum())
        c0 = idx.size - c1
        count0[node] = c0
        count1[node] = c1
        if depth >= cfg.max_depth or c0 == 0 or c1 == 0 or idx.size < 2 * cfg.min_leaf:
            return node
        chosen = np.sort(rng.choice(d, size=mtry, replace=False))
        best = None  # (score, feature, threshold); ties keep the lowest feature
        for f in chosen:
            found = _best_split(samples[idx, f], ys, cfg.min_leaf)
            if found is not None and (best is None or found[0] < best[0]):
                best = (found[0], int(f), found[1])
        if best is None:
            return node
        _, f, thr = best
        feature[node] = f
        threshold[node] = thr
        mask = samples[idx, f] <= thr
        left[node] = grow(idx[mask], depth + 1)
        right[node] = grow(idx[~mask], depth + 1)
        return node

    grow(np.arange(samples.shape[0]), 0)
    return Tree(feature, threshold, left, right, count0, count1)


def train_rf(samples, labels, cfg: RfConfig = RfConfig()) -> RandomForestModel:
    """Grow a seeded random forest on binary-labeled samples.

    Each tree draws its own generator seeded with cfg.seed + tree index, so
    the model is identical run to run and would stay identical if the trees
    were ever grown in parallel.
    """
    samples, labels = _check_training_data(samples, labels)
    n, d = samples.shape
    mtry = cfg.mtry if cfg.mtry is not None else math.ceil(math.sqrt(d))
    mtry = min(mtry, d)
    trees = []
    for t in range(cfg.n_trees):
        rng = np.random.default_rng(cfg.seed + t)
        if cfg.bootstrap:
            idx = rng.integers(0, n, size=n)
        else:
            idx = np.arange(n)
        trees.append(_grow_tree(samples[idx], labels[idx], cfg, mtry, rng))
    return RandomForestModel(trees=tuple(trees), n_features=d,
                             config=replace(cfg, mtry=mtry))


def rf_predict_batch(model: RandomForestModel, x) -> tuple[np.ndarray, np.ndarray]:
    """Labels and scores for a matrix of inputs.

    The score is the fraction of trees voting class 1; the label is 1 when
    the score reaches 0.5 (ties deliberately go to the positive class, since
    the downstream duration filter cleans up over-eager detections).
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    if x.ndim != 2 or x.shape[1] != model.n_features:
        raise ShapeError(
            f"expected inputs with {model.n_features} features, got shape {x.shape}")
    votes = np.zeros(x.shape[0], dtype=np.int64)
    for tree in model.trees:
        votes += tree.votes(x)
    scores = votes / len(model.trees)
    labels = (scores >= 0.5).astype(np.int64)
    return labels, scores


def rf_predict(model: RandomForestModel, x) -> tuple[int, float]:
    """Predicted label and class-1 score for a single feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.ndim != 1 or x.shape[0] != model.n_features:
        raise ShapeError(
            f"expected a vector of {model.n_features} features, got shape {x.shape}")
    labels, scores = rf_predict_batch(model, x.reshape(1, -1))
    return int(labels[0]), float(scores[0])


# --- linear SVM ------------------------------------------------------------

def _svm_objective(w: np.ndarray, x: np.ndarray, y: np.ndarray, lam: float) -> float:
    margins = y * (x @ w)
    hinge = np.maximum(0.0, 1.0 - margins)
    return float(lam / 2.0 * (w @ w) + hinge.mean())


def train_svm(samples, labels, cfg: SvmConfig = SvmConfig(),
              track_objective: bool = False) -> LinearSvmModel:
    """Train a linear SVM with the Pegasos schedule (step 1/(lam*t)).

    Labels 0/1 are mapped to -1/+1 and a constant-1 feature is appended so
    the bias is learned with the weights.  One seeded generator drives the
    per-epoch shuffles, so the result is bit-identical across runs.

    With track_objective the model carries a per-epoch trace: the primal
    objective averaged over the updates of each epoch.  The trace exists for
    diagnostics and tests and is not serialized.
    """
    samples, labels01 = _check_training_data(samples, labels)
    if labels01.min() == labels01.max():
        raise DegenerateDataError("SVM training needs both classes present")
    n, d = samples.shape
    x = np.concatenate([samples, np.ones((n, 1))], axis=1)
    y = np.where(labels01 == 1, 1.0, -1.0)
    w = np.zeros(d + 1, dtype=np.float64)
    rng = np.random.default_rng(cfg.seed)
    trace: list[float] = []
    t = 0
    for _ in range(cfg.epochs):
        epoch_sum = 0.0
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (cfg.lam * t)
            xi = x[i]
            if y[i] * (w @ xi) < 1.0:
                w = (1.0 - eta * cfg.lam) * w + (eta * y[i]) * xi
            else:
                w = (1.0 - eta * cfg.lam) * w
            if track_objective:
                epoch_sum += _svm_objective(w, x, y, cfg.lam)
        if track_objective:
            trace.append(epoch_sum / n)
    return LinearSvmModel(weights=w, config=cfg,
                          objective_trace=tuple(trace) if track_objective else None)


def svm_margin(model: LinearSvmModel, x) -> float:
    """Signed distance proxy w . [x; 1] for one input vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != model.weights.shape[0] - 1:
        raise ShapeError(
            f"expected a vector of {model.weights.shape[0] - 1} features, "
            f"got shape {x.shape}")
    return float(model.weights[:-1] @ x + model.weights[-1])


def svm_predict(model: LinearSvmModel, x) -> int:
    """Class decision: 1 when the margin is >= 0 (margin ties go positive)."""
    return 1 if svm_margin(model, x) >= 0.0 else 0


def svm_margin_batch(model: LinearSvmModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.weights.shape[0] - 1:
        raise ShapeError(
            f"expected a matrix with {model.weights.shape[0] - 1} columns, "
            f"got shape {x.shape}")
    return x @ model.weights[:-1] + model.weights[-1]


# --- serialization ---------------------------------------------------------
#
# Models persist as JSON with every float printed via %.17g, enough digits
# to reproduce the exact binary64 value on load.  The stock json encoder
# cannot be told how to format floats, hence the small writer below.

def _emit(obj, out: list[str]) -> None:
    if isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(",")
            out.append(json.dumps(key))
            out.append(":")
            _emit(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _emit(item, out)
        out.append("]")
    elif isinstance(obj, bool) or isinstance(obj, np.bool_):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format(float(obj), ".17g"))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif obj is None:
        out.append("null")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def _dumps(obj) -> str:
    out: list[str] = []
    _emit(obj, out)
    out.append("\n")
    return "".join(out)


def _model_document(model) -> dict:
    if isinstance(model, RandomForestModel):
        cfg = model.config
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "model_kind": "random_forest",
            "config": {
                "n_trees": cfg.n_trees, "max_depth": cfg.max_depth,
                "min_leaf": cfg.min_leaf, "mtry": cfg.mtry,
                "bootstrap": cfg.bootstrap, "seed": cfg.seed,
            },
            "parameters": {
                "n_features": model.n_features,
                "trees": [
                    {
                        "feature": tree.feature, "threshold": tree.threshold,
                        "left": tree.left, "right": tree.right,
                        "count0": tree.count0, "count1": tree.count1,
                    }
                    for tree in model.trees
                ],
            },
        }
    if isinstance(model, LinearSvmModel):
        cfg = model.config
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "model_kind": "linear_svm",
            "config": {"lam": cfg.lam, "epochs": cfg.epochs, "seed": cfg.seed},
            "parameters": {"weights": model.weights},
        }
    raise TypeError(f"cannot serialize {type(model).__name__}")


def save_model(model, sink: PathOrFile) -> None:
    """Write a model to a path or text file object."""
    text = _dumps(_model_document(model))
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        with open(sink, "w", encoding="ascii") as fh:
            fh.write(text)


def _parse_rf(doc: dict) -> RandomForestModel:
    cfg = RfConfig(**doc["config"])
    params = doc["parameters"]
    n_features = int(params["n_features"])
    trees = []
    for rec in params["trees"]:
        tree = Tree(rec["feature"], rec["threshold"], rec["left"],
                    rec["right"], rec["count0"], rec["count1"])
        if tree.feature.size == 0 or tree.feature.max() >= n_features:
            raise ModelParseError("tree references a feature outside the model")
        trees.append(tree)
    if len(trees) != cfg.n_trees:
        raise ModelParseError(
            f"model declares {cfg.n_trees} trees but holds {len(trees)}")
    return RandomForestModel(trees=tuple(trees), n_features=n_features, config=cfg)


def _parse_svm(doc: dict) -> LinearSvmModel:
    cfg = SvmConfig(**doc["config"])
    weights = np.asarray(doc["parameters"]["weights"], dtype=np.float64)
    if weights.ndim != 1 or weights.shape[0] < 2:
        raise ModelParseError("SVM weights must be a vector of at least 2 entries")
    return LinearSvmModel(weights=weights, config=cfg)


def load_model(source: PathOrFile):
    """Read back a model written by save_model.

    Raises ModelVersionError for an unknown format_version and
    ModelParseError for anything structurally wrong with the payload.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r", encoding="ascii") as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelParseError(f"model payload is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelParseError("model payload must be a JSON object")
    version = doc.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelVersionError(
            f"unsupported model format_version {version!r} "
            f"(expected {MODEL_FORMAT_VERSION})")
    kind = doc.get("model_kind")
    try:
        if kind == "random_forest":
            return _parse_rf(doc)
        if kind == "linear_svm":
            return _parse_svm(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelParseError(f"malformed {kind} model record: {exc}") from exc
    raise ModelParseError(f"unknown model_kind {kind!r}")
