"""Kernels and kernel (weighted) FDA in the span of the training points."""
from dataclasses import dataclass

import numpy as np

from . import _accel
from .dataset import Standardizer, standardize_fit
from .errors import DegenerateWeightsError, InvalidInputError, InvalidParameterError
from .linalg import DEFAULT_RIDGE, CholeskyEigensolver
from .model import FEATURE_SPACE, DiscriminantModel, check_p
from .scatter import normalize_rows, pair_scatter, weight_array

KERNEL_FAMILIES = ("linear", "polynomial", "rbf")


@dataclass(frozen=True)
class KernelSpec:
    """``linear``: x.y; ``polynomial``: (x.y + coef0)^degree; ``rbf``: exp(-gamma |x-y|^2).

    An RBF spec with ``gamma=None`` is resolved against training data by
    :meth:`resolve`.
    """

    family: str = "rbf"
    gamma: float = None
    degree: int = 2
    coef0: float = 1.0

    def __post_init__(self):
        if self.family not in KERNEL_FAMILIES:
            raise InvalidParameterError(
                f"unknown kernel family {self.family!r}; choose from {', '.join(KERNEL_FAMILIES)}")
        if self.family == "rbf" and self.gamma is not None and not self.gamma > 0:
            raise InvalidParameterError(f"RBF gamma must be positive, got {self.gamma}")
        if self.family == "polynomial" and (int(self.degree) != self.degree or self.degree < 1):
            raise InvalidParameterError(f"polynomial degree must be an integer >= 1, got {self.degree}")

    def resolve(self, X):
        """Fix ``gamma = 1 / (d * mean feature variance of X)`` when unset."""
        if self.family != "rbf" or self.gamma is not None:
            return self
        X = np.asarray(X, dtype=np.float64)
        var = float(np.mean(np.var(X, axis=1)))
        if not var > 0:
            raise InvalidInputError("cannot choose an RBF bandwidth for constant data")
        return KernelSpec("rbf", 1.0 / (X.shape[0] * var), self.degree, self.coef0)

    def to_dict(self):
        out = {"family": self.family}
        if self.family == "rbf":
            out["gamma"] = None if self.gamma is None else float(self.gamma)
        elif self.family == "polynomial":
            out["degree"] = int(self.degree)
            out["coef0"] = float(self.coef0)
        return out

    @classmethod
    def from_dict(cls, doc):
        return cls(doc["family"], doc.get("gamma"), doc.get("degree", 2), doc.get("coef0", 1.0))

    def __str__(self):
        if self.family == "rbf":
            return "rbf(gamma=auto)" if self.gamma is None else f"rbf(gamma={self.gamma:.6g})"
        if self.family == "polynomial":
            return f"polynomial(degree={self.degree}, coef0={self.coef0:g})"
        return "linear"


def gram(kernel, X1, X2):
    """Kernel matrix ``K[i, j] = k(X1[:, i], X2[:, j])``."""
    X1 = np.asarray(X1, dtype=np.float64)
    X2 = np.asarray(X2, dtype=np.float64)
    if X1.ndim != 2 or X2.ndim != 2 or X1.shape[0] != X2.shape[0]:
        raise InvalidInputError(
            f"gram needs matrices with equal feature dimension, got {X1.shape} and {X2.shape}")
    if kernel.family == "linear":
        return X1.T @ X2
    if kernel.family == "polynomial":
        return (X1.T @ X2 + kernel.coef0) ** kernel.degree
    if kernel.gamma is None:
        raise InvalidParameterError("RBF gamma unset; call KernelSpec.resolve() first")
    return _accel.rbf_gram(X1, X2, kernel.gamma)


@dataclass(frozen=True, eq=False)
class KernelClassQuantities:
    """Per-class kernel blocks.

    Attributes
    ----------
    sizes : (c,) array
    blocks : list of (n, n_r) arrays
        ``K_r``, columns of the training Gram matrix for class ``r``.
    xi : (n, c) array
        Column ``r`` is the row mean of ``K_r``.
    diffs : (c, n, c) array
        ``diffs[r]`` has columns ``xi_r - xi_l``.
    """

    sizes: np.ndarray
    blocks: list
    xi: np.ndarray
    diffs: np.ndarray

    @property
    def n_classes(self):
        return self.sizes.shape[0]

    @property
    def n_samples(self):
        return self.xi.shape[0]

    def centering(self, r):
        n_r = int(self.sizes[r])
        return np.eye(n_r) - np.full((n_r, n_r), 1.0 / n_r)


def kernel_class_quantities(K_full, labels, n_classes=None):
    K_full = np.asarray(K_full, dtype=np.float64)
    labels = np.asarray(labels)
    n = labels.shape[0]
    if K_full.shape != (n, n):
        raise InvalidInputError(f"Gram matrix {K_full.shape} does not match {n} labels")
    c = int(labels.max()) if n_classes is None else n_classes
    sizes = np.bincount(labels, minlength=c + 1)[1:].astype(np.float64)
    if np.any(sizes == 0):
        raise InvalidInputError("every class needs at least one sample")
    blocks = [K_full[:, labels == r] for r in range(1, c + 1)]
    xi = np.stack([B.mean(axis=1) for B in blocks], axis=1)
    diffs = xi.T[:, :, None] - xi[None, :, :]
    return KernelClassQuantities(sizes, blocks, xi, diffs)


def feature_within_scatter(q):
    """``Delta_W = sum_r n_r K_r H_r K_r^T``."""
    n = q.n_samples
    out = np.zeros((n, n))
    for r, K_r in enumerate(q.blocks):
        Kc = K_r - K_r.mean(axis=1, keepdims=True)  # K_r H_r
        out += q.sizes[r] * (Kc @ Kc.T)
    return 0.5 * (out + out.T)


def feature_between_scatter(q):
    c = q.n_classes
    return pair_scatter(q.diffs, q.sizes, np.ones((c, c)))


def weighted_feature_between_scatter(q, W):
    return pair_scatter(q.diffs, q.sizes, weight_array(W, q.n_classes))


def normalized_weighted_feature_between_scatter(q, W):
    return pair_scatter(q.diffs, q.sizes, normalize_rows(weight_array(W, q.n_classes)))


def feature_rank_bound(n, c):
    return min(n, c - 1)


@dataclass(frozen=True, eq=False)
class KernelProblem:
    """Standardized training data, resolved kernel and class quantities."""

    samples: np.ndarray
    labels: np.ndarray
    standardizer: Standardizer
    kernel: KernelSpec
    quantities: KernelClassQuantities
    delta_w: np.ndarray
    class_names: tuple


def prepare_kernel_problem(train, kernel, standardize=False):
    if train.n_classes < 2:
        raise InvalidInputError("kernel FDA needs at least 2 classes")
    std = standardize_fit(train) if standardize else Standardizer.identity(train.n_features)
    X = std.apply(train.samples)
    kernel = kernel.resolve(X)
    q = kernel_class_quantities(gram(kernel, X, X), train.labels, train.n_classes)
    return KernelProblem(X, train.labels, std, kernel, q, feature_within_scatter(q),
                         train.class_names)


def _model_from_solution(problem, sol, p, method, weights=None, params=None):
    return DiscriminantModel(
        kind=FEATURE_SPACE,
        basis=sol.eigenvectors[:, :p],
        eigenvalues=sol.eigenvalues[:p],
        standardizer=problem.standardizer,
        method=method,
        shift=sol.shift,
        kernel=problem.kernel,
        train_samples=problem.samples,
        weights=None if weights is None else np.asarray(getattr(weights, "alpha", weights)),
        class_names=problem.class_names,
        params=params or {},
    )


def fit_weighted_kfda(train, kernel, W, p=None, ridge=DEFAULT_RIDGE, standardize=False,
                      method="w-kfda"):
    """Leading ``p`` eigenvectors ``Y`` of ``(weighted Delta_B, Delta_W)``.

    ``W`` may also be a callable taking the :class:`KernelProblem` and returning
    weights, for schemes that depend on the standardized data.
    """
    problem = prepare_kernel_problem(train, kernel, standardize)
    p = check_p(p, feature_rank_bound(train.n_samples, train.n_classes),
                "bound min(n, c-1)")
    if callable(W):
        W = W(problem)
    alpha = weight_array(W, train.n_classes)
    if not np.any(alpha):
        scheme = getattr(W, "scheme", "given")
        raise DegenerateWeightsError(f"{scheme} weights are all zero; the between scatter vanishes")
    delta_b = pair_scatter(problem.quantities.diffs, problem.quantities.sizes, alpha)
    sol = CholeskyEigensolver(problem.delta_w, ridge).solve(delta_b, n_leading=p)
    return _model_from_solution(problem, sol, p, method, alpha, {"ridge": ridge})


def fit_kfda(train, kernel, p=None, ridge=DEFAULT_RIDGE, standardize=False):
    """Plain kernel FDA (all pair weights 1)."""
    c = train.n_classes
    model = fit_weighted_kfda(train, kernel, np.ones((c, c)), p, ridge, standardize, "kfda")
    return model
