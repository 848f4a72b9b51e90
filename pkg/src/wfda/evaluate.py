"""1-NN evaluation of fitted subspaces, the experiment matrix, and exports.

Training accuracy is leave-one-out: a training point never counts as its own
neighbour. Test accuracy uses the full training embedding.
"""
import csv
import io
import json
import math
import os
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .dataset import split
from .errors import InvalidInputError, UnsupportedOperationError, WfdaError
from .methods import fit_method
from .model import INPUT_SPACE, transform
from .pgm import write_pgm
from .weighting import write_weights_csv


def nearest_neighbor_labels(train_emb, train_labels, query_emb, leave_one_out=False):
    train_emb = np.atleast_2d(np.asarray(train_emb, dtype=np.float64))
    query_emb = np.atleast_2d(np.asarray(query_emb, dtype=np.float64))
    train_labels = np.asarray(train_labels)
    n = train_emb.shape[1]
    if n == 0:
        raise InvalidInputError("1-NN needs a non-empty training set")
    if train_labels.shape[0] != n:
        raise InvalidInputError("train labels do not match the training embedding")
    if train_emb.shape[0] != query_emb.shape[0]:
        raise InvalidInputError(
            f"embedding dimensions differ: {train_emb.shape[0]} vs {query_emb.shape[0]}")
    if leave_one_out and n < 2:
        raise InvalidInputError("leave-one-out 1-NN needs at least 2 training points")
    idx = _accel.nearest(train_emb, query_emb, exclude_self=leave_one_out)
    return train_labels[idx]


def one_nn_accuracy(train_emb, train_labels, query_emb, query_labels, leave_one_out=False):
    """Fraction of query columns whose nearest training column has the same label.

    Euclidean distance; ties go to the lowest training index. With
    ``leave_one_out`` the query must be the training set itself and each point
    is classified by its nearest *other* training point.
    """
    query_labels = np.asarray(query_labels)
    if query_labels.size == 0:
        return float("nan")
    pred = nearest_neighbor_labels(train_emb, train_labels, query_emb, leave_one_out)
    return float(np.mean(pred == query_labels))


@dataclass
class ExperimentRow:
    method: str
    space: str
    train_accuracy: float = float("nan")
    test_accuracy: float = float("nan")
    p: int = 0
    params: dict = field(default_factory=dict)
    error: str = ""


@dataclass
class ExperimentReport:
    rows: list
    metadata: dict

    COLUMNS = ("method", "space", "train_accuracy", "test_accuracy", "p", "params", "error")

    def _row_values(self, row):
        def num(v):
            return "" if math.isnan(v) else repr(float(v))
        params = ";".join(f"{k}={v}" for k, v in sorted(row.params.items()))
        return [row.method, row.space, num(row.train_accuracy), num(row.test_accuracy),
                str(row.p), params, row.error]

    def to_csv(self):
        buf = io.StringIO()
        for key in sorted(self.metadata):
            buf.write(f"# {key}={self.metadata[key]}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.COLUMNS)
        for row in self.rows:
            writer.writerow(self._row_values(row))
        return buf.getvalue()

    def to_json(self):
        doc = {"metadata": self.metadata,
               "rows": [{"method": r.method, "space": r.space,
                         "train_accuracy": None if math.isnan(r.train_accuracy) else r.train_accuracy,
                         "test_accuracy": None if math.isnan(r.test_accuracy) else r.test_accuracy,
                         "p": r.p, "params": r.params, "error": r.error} for r in self.rows]}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def format_table(self):
        """Methods as columns; per space one train row and one test row."""
        methods = list(dict.fromkeys(r.method for r in self.rows))
        spaces = list(dict.fromkeys(r.space for r in self.rows))
        cell = {(r.method, r.space): r for r in self.rows}

        def pct(row, attr):
            if row is None:
                return "--"
            if row.error:
                return "error"
            v = getattr(row, attr)
            return "--" if math.isnan(v) else f"{100 * v:.2f}%"

        header = ["space", ""] + methods
        lines = [header]
        for sp in spaces:
            lines.append([sp, "train"] + [pct(cell.get((m, sp)), "train_accuracy") for m in methods])
            lines.append(["", "test"] + [pct(cell.get((m, sp)), "test_accuracy") for m in methods])
        widths = [max(len(line[j]) for line in lines) for j in range(len(header))]
        out = ["  ".join(v.ljust(w) for v, w in zip(line, widths)).rstrip() for line in lines]
        errors = [f"{r.method} [{r.space}]: {r.error}" for r in self.rows if r.error]
        return "\n".join(out + errors) + "\n"


def evaluate_model(model, train, test):
    """(LOO train accuracy, test accuracy) of 1-NN in the model's subspace."""
    train_emb = transform(model, train.samples)
    train_acc = one_nn_accuracy(train_emb, train.labels, train_emb, train.labels,
                                leave_one_out=True)
    test_acc = float("nan")
    if test.n_samples:
        test_acc = one_nn_accuracy(train_emb, train.labels, transform(model, test.samples),
                                   test.labels)
    return train_acc, test_acc


def run_experiment_matrix(data, methods, split_spec, kernel=None, p=None, cfg=None,
                          ridge=1e-6, dataset_id=""):
    """Split, standardize on train, fit each method, and score 1-NN accuracies.

    A method that fails (for instance CDM with all-zero weights) yields a row
    carrying the error message; the other rows are unaffected.
    """
    train, test = split(data, split_spec)
    rows = []
    for spec in methods:
        row = ExperimentRow(spec.label, spec.space, params=spec.params())
        try:
            model, _ = fit_method(train, spec, kernel, p, cfg, ridge, standardize=True)
            row.p = model.p
            row.train_accuracy, row.test_accuracy = evaluate_model(model, train, test)
        except WfdaError as exc:
            row.error = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    metadata = {
        "dataset": dataset_id,
        "seed": split_spec.seed,
        "train_fraction": split_spec.train_fraction,
        "stratified": split_spec.stratified,
        "n_train": train.n_samples,
        "n_test": test.n_samples,
        "n_classes": data.n_classes,
        "n_features": data.n_features,
        "kernel": str(kernel) if kernel is not None else "rbf(gamma=auto)",
        "ridge": ridge,
    }
    return ExperimentReport(rows, metadata)


def fisherface_image(column, width, height):
    """Min-max scale a basis column to [0, 255] (round half up) as ``height x width``."""
    v = np.asarray(column, dtype=np.float64)
    if v.size != width * height:
        raise InvalidInputError(f"basis length {v.size} != {width}x{height}")
    lo, hi = float(v.min()), float(v.max())
    span = hi - lo
    if span <= 1e-12 * max(1.0, abs(lo), abs(hi)):
        pix = np.zeros_like(v)
    else:
        pix = np.floor((v - lo) / span * 255.0 + 0.5)
    return np.clip(pix, 0, 255).astype(np.uint8).reshape(height, width)


def export_fisherfaces(model, width, height, count, out_dir):
    """Write the leading ``count`` basis columns as ``fisherface_<k>.pgm`` (k from 1)."""
    if model.kind != INPUT_SPACE:
        raise UnsupportedOperationError(
            "Fisherfaces need an input-space model; kernel directions live in the "
            "n-dimensional coefficient space and are not images")
    if width * height != model.basis.shape[0]:
        raise InvalidInputError(
            f"width*height = {width * height} but the model has {model.basis.shape[0]} features")
    if count > model.p:
        warnings.warn(f"only {model.p} directions available; exporting {model.p}",
                      RuntimeWarning, stacklevel=2)
        count = model.p
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for k in range(count):
        path = os.path.join(out_dir, f"fisherface_{k + 1}.pgm")
        write_pgm(path, fisherface_image(model.basis[:, k], width, height))
        paths.append(path)
    return paths


def export_weights(W, out_path):
    """Write a weight matrix as a headerless full-precision CSV."""
    write_weights_csv(W, out_path)
    return out_path

