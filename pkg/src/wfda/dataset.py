"""Labeled datasets: validation, per-class statistics, standardization,
stratified splitting and ingestion from CSV or PGM image directories.

Samples are stored column-wise (``d x n``) and labels are integers in
``1..c``.
"""
import csv
import math
import os
import re
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import IngestionError, InvalidInputError, InvalidParameterError
from .pgm import read_pgm, resample_nearest

STD_FLOOR = 1e-12


def natural_key(text):
    """Sort key that orders ``s2`` before ``s10``."""
    return [int(tok) if tok.isdigit() else tok for tok in re.split(r"(\d+)", str(text))]


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Samples as columns of a ``d x n`` matrix with labels in ``1..c``.

    ``class_names`` fixes ``c``; when omitted it defaults to
    ``("1", ..., str(max(labels)))``. A partition produced by :func:`split` may
    leave a class without samples; :func:`class_statistics` rejects that.
    """

    samples: np.ndarray
    labels: np.ndarray
    class_names: tuple = None

    def __post_init__(self):
        X = np.array(self.samples, dtype=np.float64)
        if X.ndim != 2:
            raise InvalidInputError("samples must be a d x n matrix")
        y = np.asarray(self.labels)
        if y.ndim != 1 or y.shape[0] != X.shape[1]:
            raise InvalidInputError(
                f"expected {X.shape[1]} labels, got shape {y.shape}")
        if y.size and not np.all(np.equal(np.mod(y, 1), 0)):
            raise InvalidInputError("labels must be integers")
        y = y.astype(np.int64)
        if not np.all(np.isfinite(X)):
            raise InvalidInputError("samples contain non-finite values")
        names = self.class_names
        if names is None:
            c = int(y.max()) if y.size else 0
            names = tuple(str(i) for i in range(1, c + 1))
        names = tuple(str(nm) for nm in names)
        if y.size and (y.min() < 1 or y.max() > len(names)):
            raise InvalidInputError(f"labels must lie in 1..{len(names)}")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "samples", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "class_names", names)

    @property
    def n_features(self):
        return self.samples.shape[0]

    @property
    def n_samples(self):
        return self.samples.shape[1]

    @property
    def n_classes(self):
        return len(self.class_names)

    @cached_property
    def class_index(self):
        """Map class id -> array of sample column indices."""
        return {r: np.flatnonzero(self.labels == r) for r in range(1, self.n_classes + 1)}

    def class_sizes(self):
        return np.bincount(self.labels, minlength=self.n_classes + 1)[1:]

    def subset(self, columns):
        columns = np.asarray(columns, dtype=np.int64)
        return LabeledDataset(self.samples[:, columns], self.labels[columns], self.class_names)

    def with_samples(self, samples):
        return LabeledDataset(samples, self.labels, self.class_names)


@dataclass(frozen=True, eq=False)
class ClassStatistics:
    """Per-class quantities shared by the scatter and weighting code.

    Attributes
    ----------
    sizes : (c,) array
        Class sizes ``n_r``.
    means : (d, c) array
        Class means as columns.
    centered : list of (d, n_r) arrays
        Class blocks with their own mean removed.
    diffs : (c, d, c) array
        ``diffs[r]`` is the mean-difference matrix whose column ``l`` is
        ``mu_r - mu_l``.
    """

    sizes: np.ndarray
    means: np.ndarray
    centered: list
    diffs: np.ndarray = field(repr=False)

    @property
    def n_classes(self):
        return self.sizes.shape[0]

    @property
    def n_features(self):
        return self.means.shape[0]

    @property
    def size_matrix(self):
        """``N = diag(n_1, ..., n_c)``."""
        return np.diag(self.sizes.astype(np.float64))


def class_statistics(data):
    """Compute class sizes, means, centered blocks and mean differences."""
    sizes = data.class_sizes()
    empty = [data.class_names[i] for i in np.flatnonzero(sizes == 0)]
    if empty:
        raise InvalidInputError(f"classes without samples: {', '.join(empty)}")
    X = data.samples
    means = np.empty((X.shape[0], data.n_classes))
    centered = []
    for r, cols in data.class_index.items():
        block = X[:, cols]
        mu = block.mean(axis=1)
        means[:, r - 1] = mu
        centered.append(block - mu[:, None])
    diffs = means.T[:, :, None] - means[None, :, :]
    return ClassStatistics(sizes.astype(np.float64), means, centered, diffs)


@dataclass(frozen=True, eq=False)
class Standardizer:
    """Per-feature affine map ``(x - mean) / stddev`` (population stddev)."""

    mean: np.ndarray
    stddev: np.ndarray

    @classmethod
    def identity(cls, d):
        return cls(np.zeros(d), np.ones(d))

    def apply(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.shape[0] != self.mean.shape[0]:
            raise InvalidInputError(
                f"standardizer expects {self.mean.shape[0]} features, got {X.shape[0]}")
        return (X - self.mean[:, None]) / self.stddev[:, None]


def standardize_fit(data):
    """Fit a :class:`Standardizer` on ``data`` (a dataset or ``d x n`` matrix)."""
    X = data.samples if isinstance(data, LabeledDataset) else np.asarray(data, dtype=np.float64)
    if X.shape[1] < 2:
        raise InvalidInputError("standardization needs at least 2 samples")
    mean = X.mean(axis=1)
    std = X.std(axis=1)
    low = std < STD_FLOOR
    if np.any(low):
        warnings.warn(
            f"{int(low.sum())} constant feature(s); stddev floored at {STD_FLOOR:g}",
            RuntimeWarning, stacklevel=2)
        std = np.where(low, STD_FLOOR, std)
    return Standardizer(mean, std)


def standardize_apply(standardizer, data):
    if isinstance(data, LabeledDataset):
        return data.with_samples(standardizer.apply(data.samples))
    return standardizer.apply(data)


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.66
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise InvalidParameterError(
                f"train_fraction must lie in (0, 1), got {self.train_fraction}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise InvalidParameterError("seed must be a non-negative integer")


def _train_count(size, fraction):
    count = int(math.floor(fraction * size + 0.5))
    if size >= 2:
        count = min(max(count, 1), size - 1)
    return min(max(count, 1), size)


def split(data, spec):
    """Split into (train, test).

    Stratified splits shuffle each class with the seeded generator and send
    ``round_half_up(fraction * n_r)`` samples to train, keeping at least one
    sample on each side when ``n_r >= 2``. Column order within each partition
    follows the original order.
    """
    rng = np.random.default_rng(spec.seed)
    if spec.stratified:
        train_cols = []
        for r in range(1, data.n_classes + 1):
            cols = data.class_index[r]
            if cols.size == 0:
                continue
            perm = rng.permutation(cols)
            train_cols.append(perm[:_train_count(cols.size, spec.train_fraction)])
        train_cols = np.concatenate(train_cols) if train_cols else np.empty(0, np.int64)
    else:
        n = data.n_samples
        perm = rng.permutation(n)
        train_cols = perm[:_train_count(n, spec.train_fraction)]
    mask = np.zeros(data.n_samples, dtype=bool)
    mask[train_cols] = True
    return data.subset(np.flatnonzero(mask)), data.subset(np.flatnonzero(~mask))


def _label_ids(raw_labels):
    names = sorted(set(raw_labels), key=natural_key)
    lookup = {name: i + 1 for i, name in enumerate(names)}
    return np.array([lookup[v] for v in raw_labels], dtype=np.int64), tuple(names)


def read_csv_matrix(path, label_column=None, header=False):
    """Parse a numeric CSV (one sample per row).

    Returns ``(X, raw_labels)`` where ``X`` is ``d x n`` and ``raw_labels`` is a
    list of label strings (``None`` when no label column is given).
    """
    try:
        with open(path, newline="") as fh:
            rows = [row for row in csv.reader(fh) if row and any(cell.strip() for cell in row)]
    except OSError as exc:
        raise IngestionError(f"{path}: cannot read ({exc})") from exc
    names = None
    if header and rows:
        names = [h.strip() for h in rows[0]]
        rows = rows[1:]
    if not rows:
        raise IngestionError(f"{path}: no data rows")
    label_idx = None
    if label_column is not None:
        if isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
            if names is None or label_column not in names:
                raise IngestionError(f"{path}: label column {label_column!r} not found in header")
            label_idx = names.index(label_column)
        else:
            label_idx = int(label_column)
    width = len(rows[0])
    if label_idx is not None:
        if label_idx < 0:
            label_idx += width
        if not 0 <= label_idx < width:
            raise IngestionError(f"{path}: label column index {label_column} out of range")
    values, labels = [], []
    for lineno, row in enumerate(rows, start=2 if header else 1):
        if len(row) != width:
            raise IngestionError(
                f"{path}: record {lineno} has {len(row)} fields, expected {width}")
        feats = []
        for j, cell in enumerate(row):
            if j == label_idx:
                labels.append(cell.strip())
                continue
            try:
                feats.append(float(cell))
            except ValueError:
                raise IngestionError(
                    f"{path}: record {lineno}, field {j + 1}: non-numeric value {cell!r}") from None
        values.append(feats)
    X = np.array(values, dtype=np.float64).T
    if not np.all(np.isfinite(X)):
        raise IngestionError(f"{path}: non-finite values")
    return X, (labels if label_idx is not None else None)


def ingest_csv(path, label_column, header=False):
    """Load a labeled CSV; label strings map to ``1..c`` in natural sort order."""
    X, raw = read_csv_matrix(path, label_column, header)
    if raw is None:
        raise IngestionError(f"{path}: a label column is required")
    labels, names = _label_ids(raw)
    return LabeledDataset(X, labels, names)


def ingest_image_dir(path, width, height, max_classes=None):
    """Load ``<root>/<class>/<image>.pgm`` into a dataset.

    Class folders and files are taken in natural sort order; images are
    resampled by nearest neighbour to ``height x width`` and flattened row-major.
    """
    try:
        classes = sorted((e for e in os.listdir(path) if os.path.isdir(os.path.join(path, e))),
                         key=natural_key)
    except OSError as exc:
        raise IngestionError(f"{path}: cannot list directory ({exc})") from exc
    if max_classes is not None:
        classes = classes[:max_classes]
    columns, labels = [], []
    for r, name in enumerate(classes, start=1):
        folder = os.path.join(path, name)
        files = sorted((f for f in os.listdir(folder) if f.lower().endswith(".pgm")),
                       key=natural_key)
        for fname in files:
            img = read_pgm(os.path.join(folder, fname))
            columns.append(resample_nearest(img, width, height).reshape(-1).astype(np.float64))
            labels.append(r)
    if not columns:
        raise IngestionError(f"{path}: no PGM images found")
    return LabeledDataset(np.stack(columns, axis=1), np.array(labels), tuple(classes))


def make_gaussian_classes(n_classes=3, n_per_class=10, n_features=5, separation=3.0,
                          seed=0):
    """Isotropic Gaussian classes with random means; handy for demos and tests."""
    rng = np.random.default_rng(seed)
    centers = rng.normal(scale=separation, size=(n_features, n_classes))
    cols, labels = [], []
    for r in range(n_classes):
        cols.append(centers[:, [r]] + rng.normal(size=(n_features, n_per_class)))
        labels.extend([r + 1] * n_per_class)
    return LabeledDataset(np.concatenate(cols, axis=1), np.array(labels))
