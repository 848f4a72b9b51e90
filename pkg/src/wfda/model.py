"""Fitted discriminant models and their on-disk container.

The container is a JSON document with a versioned header::

    {"format": "wfda-model", "version": 1, "kind": ..., "p": ...,
     "basis": {"shape": [r, p], "data": [... row-major float64 ...]}, ...}

Floats are written with ``repr`` precision, so a save/load round trip is
lossless.
"""
import json
from dataclasses import dataclass, field

import numpy as np

from .dataset import LabeledDataset, Standardizer
from .errors import (IngestionError, InvalidInputError, InvalidParameterError,
                     UnsupportedOperationError)

FORMAT_NAME = "wfda-model"
FORMAT_VERSION = 1

INPUT_SPACE = "input_space"
FEATURE_SPACE = "feature_space"


@dataclass(frozen=True, eq=False)
class DiscriminantModel:
    """A fitted projection.

    For ``kind == "input_space"`` the basis is the ``d x p`` matrix ``U``;
    for ``"feature_space"`` it is the ``n x p`` coefficient matrix ``Y`` and
    ``train_samples`` holds the standardized training matrix used to build
    kernel columns for new data.
    """

    kind: str
    basis: np.ndarray
    eigenvalues: np.ndarray
    standardizer: Standardizer
    method: str = "fda"
    shift: float = 0.0
    kernel: object = None
    train_samples: np.ndarray = None
    weights: np.ndarray = None
    class_names: tuple = ()
    params: dict = field(default_factory=dict)

    @property
    def p(self):
        return self.basis.shape[1]

    @property
    def n_features(self):
        return self.standardizer.mean.shape[0]


def check_p(p, bound, what):
    if p is None:
        return bound
    if int(p) != p or not 1 <= p <= bound:
        raise InvalidParameterError(f"p must lie in [1, {bound}] ({what}), got {p}")
    return int(p)


def _matrix(X, name):
    if isinstance(X, LabeledDataset):
        return X.samples
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise InvalidInputError(f"{name} must be a matrix with samples as columns")
    return X


def project(model, X):
    """Embed the columns of ``X`` with an input-space model: ``U^T standardize(X)``."""
    if model.kind != INPUT_SPACE:
        raise UnsupportedOperationError("project() needs an input-space model; use kernel_project()")
    X = _matrix(X, "X")
    if X.shape[0] != model.n_features:
        raise InvalidInputError(f"model expects {model.n_features} features, got {X.shape[0]}")
    return model.basis.T @ model.standardizer.apply(X)


def kernel_project(model, X):
    """Embed with a feature-space model: ``Y^T K(X_train, standardize(X))``."""
    from .kfda import gram

    if model.kind != FEATURE_SPACE:
        raise UnsupportedOperationError("kernel_project() needs a feature-space model")
    X = _matrix(X, "X")
    if X.shape[0] != model.n_features:
        raise InvalidInputError(f"model expects {model.n_features} features, got {X.shape[0]}")
    K = gram(model.kernel, model.train_samples, model.standardizer.apply(X))
    return model.basis.T @ K


def transform(model, X):
    """Dispatch to :func:`project` or :func:`kernel_project` by model kind."""
    if model.kind == FEATURE_SPACE:
        return kernel_project(model, X)
    return project(model, X)


def _encode(M):
    if M is None:
        return None
    M = np.asarray(M, dtype=np.float64)
    return {"shape": list(M.shape), "data": [float(v) for v in M.reshape(-1)]}


def _decode(obj):
    if obj is None:
        return None
    return np.array(obj["data"], dtype=np.float64).reshape(obj["shape"])


def model_to_dict(model):
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "kind": model.kind,
        "method": model.method,
        "p": model.p,
        "shift": float(model.shift),
        "basis": _encode(model.basis),
        "eigenvalues": _encode(model.eigenvalues),
        "standardizer": {"mean": _encode(model.standardizer.mean),
                         "stddev": _encode(model.standardizer.stddev)},
        "kernel": model.kernel.to_dict() if model.kernel is not None else None,
        "train_samples": _encode(model.train_samples),
        "weights": _encode(model.weights),
        "class_names": list(model.class_names),
        "params": model.params,
    }


def model_from_dict(doc):
    from .kfda import KernelSpec

    if doc.get("format") != FORMAT_NAME:
        raise IngestionError("not a wfda model file")
    if doc.get("version") != FORMAT_VERSION:
        raise IngestionError(f"unsupported model format version {doc.get('version')}")
    std = doc["standardizer"]
    kernel = KernelSpec.from_dict(doc["kernel"]) if doc.get("kernel") else None
    return DiscriminantModel(
        kind=doc["kind"],
        basis=_decode(doc["basis"]),
        eigenvalues=_decode(doc["eigenvalues"]),
        standardizer=Standardizer(_decode(std["mean"]), _decode(std["stddev"])),
        method=doc.get("method", ""),
        shift=float(doc.get("shift", 0.0)),
        kernel=kernel,
        train_samples=_decode(doc.get("train_samples")),
        weights=_decode(doc.get("weights")),
        class_names=tuple(doc.get("class_names", ())),
        params=doc.get("params", {}),
    )


def save_model(model, path):
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh)


def load_model(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, ValueError) as exc:
        raise IngestionError(f"{path}: cannot load model ({exc})") from exc
    try:
        return model_from_dict(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise IngestionError(f"{path}: malformed model file ({exc})") from exc
