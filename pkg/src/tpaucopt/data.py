"""Datasets, synthetic generators, and class-ratio-controlled batching.

All randomness flows through explicit seeds; generators and the batch
sampler are pure functions of their arguments, so replays are
bitwise-identical with no shared RNG state.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Dataset",
    "ScorePair",
    "BatchSpec",
    "load_csv",
    "save_csv",
    "load_scores_csv",
    "save_scores_csv",
    "gen_gaussian_scores",
    "gen_gaussian_features",
    "sample_batch",
]


@dataclass(frozen=True)
class Dataset:
    """Immutable labeled sample: feature matrix plus 0/1 labels."""

    features: np.ndarray
    labels: np.ndarray
    pos_index: np.ndarray = field(init=False)
    neg_index: np.ndarray = field(init=False)

    def __post_init__(self):
        features = np.ascontiguousarray(self.features, dtype=float)
        labels = np.asarray(self.labels)
        if features.ndim != 2:
            raise ValueError("features must be a 2-d matrix")
        if labels.shape != (features.shape[0],):
            raise ValueError("labels must have one entry per feature row")
        if not np.isfinite(features).all():
            raise ValueError("features contain non-finite values")
        if not np.isin(labels, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")
        labels = labels.astype(np.int64)
        pos = np.flatnonzero(labels == 1)
        neg = np.flatnonzero(labels == 0)
        if pos.size == 0:
            raise ValueError("missing positive class")
        if neg.size == 0:
            raise ValueError("missing negative class")
        for arr in (features, labels, pos, neg):
            arr.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "pos_index", pos)
        object.__setattr__(self, "neg_index", neg)

    @property
    def n_pos(self) -> int:
        return int(self.pos_index.size)

    @property
    def n_neg(self) -> int:
        return int(self.neg_index.size)

    @property
    def dim(self) -> int:
        return int(self.features.shape[1])


@dataclass(frozen=True)
class ScorePair:
    """Scores of the positive and negative pools, each in [0, 1]."""

    pos_scores: np.ndarray
    neg_scores: np.ndarray

    def __post_init__(self):
        for name in ("pos_scores", "neg_scores"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.ndim != 1 or arr.size == 0:
                raise ValueError(f"{name} must be a non-empty vector")
            if not np.isfinite(arr).all():
                raise ValueError(f"{name} contains non-finite values")
            if arr.min() < 0.0 or arr.max() > 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_pos(self) -> int:
        return int(self.pos_scores.size)

    @property
    def n_neg(self) -> int:
        return int(self.neg_scores.size)


@dataclass(frozen=True)
class BatchSpec:
    """Mini-batch shape: total size, positives per batch, sampling seed.

    ``pos_per_batch=None`` resolves to round(batch_size / 11), i.e. a
    1:10 positive:negative ratio.
    """

    batch_size: int
    pos_per_batch: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 2:
            raise ValueError("batch_size must be >= 2")
        if self.pos_per_batch is None:
            object.__setattr__(
                self, "pos_per_batch", max(1, round(self.batch_size / 11))
            )
        if not 0 < self.pos_per_batch < self.batch_size:
            raise ValueError("need 0 < pos_per_batch < batch_size")

    @property
    def neg_per_batch(self) -> int:
        return self.batch_size - self.pos_per_batch


def _parse_float(token: str, line_no: int, path) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ValueError(f"{path}:{line_no}: cannot parse {token!r} as a number")
    if not np.isfinite(value):
        raise ValueError(f"{path}:{line_no}: non-finite value {token!r}")
    return value


def _parse_label(token: str, line_no: int, path) -> int:
    if token not in ("0", "1"):
        raise ValueError(f"{path}:{line_no}: label must be 0 or 1, got {token!r}")
    return int(token)


def load_csv(path) -> Dataset:
    """Read a feature CSV (header ``label,f1,...,fd``) into a Dataset."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "label" or len(header) < 2:
            raise ValueError(f"{path}:1: expected header 'label,f1,...,fd'")
        width = len(header)
        labels, rows = [], []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise ValueError(
                    f"{path}:{line_no}: expected {width} columns, got {len(row)}"
                )
            labels.append(_parse_label(row[0], line_no, path))
            rows.append([_parse_float(tok, line_no, path) for tok in row[1:]])
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return Dataset(np.array(rows, dtype=float), np.array(labels))


def save_csv(ds: Dataset, path) -> None:
    """Write a Dataset back to the feature-CSV format, round-trip exact."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label"] + [f"f{i + 1}" for i in range(ds.dim)])
        for label, row in zip(ds.labels, ds.features):
            writer.writerow([int(label)] + [repr(float(x)) for x in row])


def load_scores_csv(path) -> ScorePair:
    """Read a score CSV (header ``label,score``) into a ScorePair."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["label", "score"]:
            raise ValueError(f"{path}:1: expected header 'label,score'")
        pos, neg = [], []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise ValueError(f"{path}:{line_no}: expected 2 columns")
            label = _parse_label(row[0], line_no, path)
            score = _parse_float(row[1], line_no, path)
            (pos if label == 1 else neg).append(score)
    if not pos:
        raise ValueError(f"{path}: missing positive class")
    if not neg:
        raise ValueError(f"{path}: missing negative class")
    return ScorePair(np.array(pos), np.array(neg))


def save_scores_csv(scores: ScorePair, path) -> None:
    """Write a ScorePair as a score CSV, positives first."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label", "score"])
        for s in scores.pos_scores:
            writer.writerow([1, repr(float(s))])
        for s in scores.neg_scores:
            writer.writerow([0, repr(float(s))])


def gen_gaussian_scores(n_pos: int, n_neg: int, seed: int) -> ScorePair:
    """Draw scores from N(0.5, 0.08) / N(0.3, 0.08), clamped into [0, 1].

    At these parameters the clamp is ~6 sigma out, so the sample law is
    effectively the stated Gaussian.
    """
    if n_pos < 1 or n_neg < 1:
        raise ValueError("need n_pos >= 1 and n_neg >= 1")
    rng = np.random.default_rng(seed)
    pos = np.clip(rng.normal(0.5, 0.08, size=n_pos), 0.0, 1.0)
    neg = np.clip(rng.normal(0.3, 0.08, size=n_neg), 0.0, 1.0)
    return ScorePair(pos, neg)


def gen_gaussian_features(
    n_pos: int, n_neg: int, d: int, separation: float, seed: int
) -> Dataset:
    """Two spherical Gaussian clouds at +/- separation/sqrt(d) per axis.

    Positives come first in row order; labels are set accordingly.
    """
    if n_pos < 1 or n_neg < 1:
        raise ValueError("need n_pos >= 1 and n_neg >= 1")
    if d < 1:
        raise ValueError("need d >= 1")
    if separation < 0:
        raise ValueError("separation must be >= 0")
    rng = np.random.default_rng(seed)
    shift = separation / np.sqrt(d)
    pos = rng.standard_normal((n_pos, d)) + shift
    neg = rng.standard_normal((n_neg, d)) - shift
    features = np.vstack([pos, neg])
    labels = np.concatenate([np.ones(n_pos, dtype=int), np.zeros(n_neg, dtype=int)])
    return Dataset(features, labels)


def sample_batch(ds: Dataset, spec: BatchSpec, epoch: int, step: int):
    """Draw one batch of row indices, (positives, negatives).

    Sampling is without replacement within the batch and is a pure
    function of (spec.seed, epoch, step).
    """
    if ds.n_pos < spec.pos_per_batch:
        raise ValueError(
            f"positive pool ({ds.n_pos}) smaller than pos_per_batch "
            f"({spec.pos_per_batch})"
        )
    if ds.n_neg < spec.neg_per_batch:
        raise ValueError(
            f"negative pool ({ds.n_neg}) smaller than neg_per_batch "
            f"({spec.neg_per_batch})"
        )
    rng = np.random.default_rng([spec.seed, epoch, step])
    pos = rng.choice(ds.pos_index, size=spec.pos_per_batch, replace=False)
    neg = rng.choice(ds.neg_index, size=spec.neg_per_batch, replace=False)
    return pos, neg
