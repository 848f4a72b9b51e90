"""Method tags and a single fit entry point for every FDA variant.

Schemes: ``fda``, ``apac``, ``pow``, ``cdm``, ``knn``, ``cw`` (cosine of the
input-space means), ``cw2`` (normalized kernel between means; feature space
only) and ``aw`` (learned weights). Each runs in the ``input`` or ``feature``
space.
"""
from dataclasses import dataclass, replace

from .autoweight import AwConfig, fit_aw_fda, fit_aw_kfda
from .dataset import LabeledDataset, class_statistics
from .errors import InvalidParameterError, UnsupportedOperationError
from .fda import fit_fda, fit_weighted_fda
from .kfda import KernelSpec, fit_kfda, fit_weighted_kfda
from .linalg import DEFAULT_RIDGE
from .weighting import (apac_weights, cdm_weights, class_distances, cosine_weights,
                        kernel_cosine_weights, knn_weights, pow_weights)

SCHEMES = ("fda", "apac", "pow", "cdm", "knn", "cw", "cw2", "aw")
SPACES = ("input", "feature")


@dataclass(frozen=True)
class MethodSpec:
    scheme: str
    space: str = "input"
    k: int = None
    m: int = 3

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise InvalidParameterError(f"unknown method {self.scheme!r}")
        if self.space not in SPACES:
            raise InvalidParameterError(f"unknown space {self.space!r}")

    @property
    def label(self):
        if self.scheme == "knn":
            return f"kNN(k={self.k})"
        if self.scheme == "aw":
            return "AW" if self.k is None else f"AW(k={self.k})"
        if self.scheme == "pow" and self.m != 3:
            return f"POW(m={self.m})"
        return {"fda": "FDA", "apac": "APAC", "pow": "POW", "cdm": "CDM",
                "cw": "CW", "cw2": "CW-v2"}[self.scheme]

    @property
    def tag(self):
        """Canonical CLI tag, e.g. ``knn:3`` or ``w-kfda:apac``."""
        base = self.scheme
        if self.scheme == "knn":
            base = f"knn:{self.k}"
        elif self.scheme == "aw" and self.k is not None:
            base = f"aw:{self.k}"
        elif self.scheme == "pow" and self.m != 3:
            base = f"pow:{self.m}"
        if self.space == "input":
            return base
        feature = {"fda": "kfda", "cw": "cw-kfda:v1", "cw2": "cw-kfda:v2"}
        if self.scheme in feature:
            return feature[self.scheme]
        if self.scheme == "aw":
            return "aw-kfda" + base[2:]
        return f"w-kfda:{base}"

    def params(self):
        out = {}
        if self.scheme in ("knn", "aw") and self.k is not None:
            out["k"] = self.k
        if self.scheme == "pow":
            out["m"] = self.m
        return out


def _parse_base(token, knn_k, aw_k, pow_m):
    name, _, arg = token.partition(":")
    name = name.strip().lower()
    aliases = {"cosine": "cw", "cw-fda": "cw", "aw-fda": "aw"}
    name = aliases.get(name, name)
    try:
        value = int(arg) if arg else None
    except ValueError:
        raise InvalidParameterError(f"bad parameter in method tag {token!r}") from None
    if name == "knn":
        return name, {"k": value if value is not None else knn_k}
    if name == "aw":
        return name, {"k": value if value is not None else aw_k}
    if name == "pow":
        return name, {"m": value if value is not None else pow_m}
    if arg:
        raise InvalidParameterError(f"method {name!r} takes no parameter")
    if name not in SCHEMES:
        raise InvalidParameterError(f"unknown method {token!r}")
    return name, {}


def parse_method(tag, space="input", knn_k=1, aw_k=None, pow_m=3):
    """Expand a method tag into MethodSpecs.

    Feature-space tags (``kfda``, ``w-kfda:<scheme>``, ``cw-kfda:v1|v2``,
    ``aw-kfda[:k]``) fix the space themselves; plain scheme tags use ``space``,
    which may be ``input``, ``feature`` or ``both``.
    """
    tag = tag.strip()
    low = tag.lower()
    feature_scheme = None
    if low == "kfda":
        feature_scheme, kw = "fda", {}
    elif low.startswith("w-kfda:"):
        feature_scheme, kw = _parse_base(tag[len("w-kfda:"):], knn_k, aw_k, pow_m)
    elif low in ("cw-kfda", "cw-kfda:v1"):
        feature_scheme, kw = "cw", {}
    elif low == "cw-kfda:v2":
        feature_scheme, kw = "cw2", {}
    elif low == "aw-kfda" or low.startswith("aw-kfda:"):
        feature_scheme, kw = _parse_base("aw" + tag[len("aw-kfda"):], knn_k, aw_k, pow_m)
    if feature_scheme is not None:
        if space == "input":
            raise InvalidParameterError(f"method {tag!r} is a feature-space method")
        return [MethodSpec(feature_scheme, "feature", **kw)]
    scheme, kw = _parse_base(tag, knn_k, aw_k, pow_m)
    spaces = SPACES if space == "both" else (space,)
    for sp in spaces:
        if sp not in SPACES:
            raise InvalidParameterError(f"space must be input, feature or both, got {space!r}")
    return [MethodSpec(scheme, sp, **kw) for sp in spaces]


def parse_methods(tags, space="input", **defaults):
    specs = []
    for tag in (tags.split(",") if isinstance(tags, str) else tags):
        if tag.strip():
            specs.extend(parse_method(tag, space, **defaults))
    if not specs:
        raise InvalidParameterError("no methods given")
    return specs


def _restandardized(problem):
    return LabeledDataset(problem.samples, problem.labels, problem.class_names)


def _stats(problem):
    return getattr(problem, "stats", None) or class_statistics(_restandardized(problem))


def _weights_for(spec):
    if spec.scheme == "apac":
        return lambda pr: apac_weights(class_distances(_stats(pr)))
    if spec.scheme == "pow":
        return lambda pr: pow_weights(class_distances(_stats(pr)), spec.m)
    if spec.scheme == "cdm":
        return lambda pr: cdm_weights(_restandardized(pr))
    if spec.scheme == "knn":
        return lambda pr: knn_weights(class_distances(_stats(pr)), spec.k)
    if spec.scheme == "cw":
        return lambda pr: cosine_weights(_stats(pr))
    if spec.scheme == "cw2":
        return lambda pr: kernel_cosine_weights(_stats(pr), pr.kernel)
    raise ValueError(spec.scheme)


def fit_method(train, spec, kernel=None, p=None, cfg=None, ridge=DEFAULT_RIDGE,
               standardize=True):
    """Fit ``spec`` on ``train``; returns ``(model, report)`` (report is None
    unless the weights are learned)."""
    kernel = kernel or KernelSpec("rbf")
    cfg = cfg or AwConfig()
    if spec.scheme == "knn" and spec.k is None:
        spec = replace(spec, k=1)
    if spec.space == "input":
        if spec.scheme == "fda":
            return fit_fda(train, p, ridge, standardize), None
        if spec.scheme == "aw":
            return fit_aw_fda(train, p, replace(cfg, k=spec.k) if spec.k else cfg, ridge,
                              standardize)
        if spec.scheme == "cw2":
            raise UnsupportedOperationError("CW version 2 is defined in the feature space only")
        return fit_weighted_fda(train, _weights_for(spec), p, ridge, standardize,
                                spec.tag), None
    if spec.scheme == "fda":
        return fit_kfda(train, kernel, p, ridge, standardize), None
    if spec.scheme == "aw":
        return fit_aw_kfda(train, kernel, p, replace(cfg, k=spec.k) if spec.k else cfg, ridge,
                           standardize)
    return fit_weighted_kfda(train, kernel, _weights_for(spec), p, ridge, standardize,
                             spec.tag), None
