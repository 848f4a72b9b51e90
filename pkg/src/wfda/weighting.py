"""Class-pair weight matrices for weighted FDA / KFDA.

Every manual scheme returns a non-negative ``c x c`` matrix with a zero
diagonal; row ``r`` supplies ``A_r = diag(alpha[r])``.
"""
import csv
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from .dataset import class_statistics
from .errors import (DegenerateGeometryError, IngestionError, InvalidInputError,
                     InvalidParameterError, NumericalError)
from .linalg import erf


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """Non-negative class-pair weights ``alpha[r, l]`` plus a scheme tag."""

    alpha: np.ndarray
    scheme: str = "custom"

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=np.float64)
        if alpha.ndim != 2 or alpha.shape[0] != alpha.shape[1]:
            raise InvalidInputError(f"weight matrix must be square, got {alpha.shape}")
        if not np.all(np.isfinite(alpha)):
            raise InvalidInputError("weights must be finite")
        if np.any(alpha < 0):
            raise InvalidInputError("weights must be non-negative")
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)

    @property
    def n_classes(self):
        return self.alpha.shape[0]

    @classmethod
    def uniform(cls, c):
        return cls(np.ones((c, c)), "uniform")

    def row_matrix(self, r):
        """``A_r`` for 0-based class index ``r``."""
        return np.diag(self.alpha[r])


def class_distances(stats):
    """``d[r, l] = ||mu_r - mu_l||_2``."""
    dist = np.sqrt(np.sum(stats.diffs ** 2, axis=1))
    dist = 0.5 * (dist + dist.T)
    np.fill_diagonal(dist, 0.0)
    return dist


def _off_diagonal_distances(dist):
    dist = np.asarray(dist, dtype=np.float64)
    if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
        raise InvalidInputError("distance matrix must be square")
    off = ~np.eye(dist.shape[0], dtype=bool)
    if np.any(dist[off] <= 0):
        r, l = np.argwhere((dist <= 0) & off)[0]
        raise DegenerateGeometryError(f"classes {r + 1} and {l + 1} have coincident means")
    return dist, off


def apac_weights(dist):
    """``alpha = erf(d / (2 sqrt 2)) / (2 d^2)`` off the diagonal."""
    dist, off = _off_diagonal_distances(dist)
    alpha = np.zeros_like(dist)
    d = dist[off]
    alpha[off] = erf(d / (2.0 * np.sqrt(2.0))) / (2.0 * d * d)
    return WeightMatrix(alpha, "apac")


def pow_weights(dist, m=3):
    """``alpha = d^-m`` off the diagonal; ``m >= 3``."""
    if int(m) != m or m < 3:
        raise InvalidParameterError(f"POW exponent must be an integer >= 3, got {m}")
    dist, off = _off_diagonal_distances(dist)
    alpha = np.zeros_like(dist)
    alpha[off] = dist[off] ** (-float(m))
    return WeightMatrix(alpha, f"pow(m={int(m)})")


def qda_predict(train, X=None, reg=1e-3):
    """Regularized Gaussian QDA fit on ``train``; returns labels for ``X``.

    Class ``r`` uses covariance ``Sigma_r + lam_r I`` with
    ``lam_r = reg * trace(Sigma_r) / d`` (``Sigma_r`` divides by ``n_r``) and
    prior ``n_r / n``. Ties go to the lowest class index.
    """
    stats = class_statistics(train)
    X = train.samples if X is None else np.asarray(X, dtype=np.float64)
    d = stats.n_features
    n = stats.sizes.sum()
    scores = np.empty((stats.n_classes, X.shape[1]))
    for r in range(stats.n_classes):
        Xc = stats.centered[r]
        cov = (Xc @ Xc.T) / stats.sizes[r]
        lam = reg * np.trace(cov) / d
        cov[np.diag_indices(d)] += lam
        try:
            L = sla.cholesky(cov, lower=True)
        except sla.LinAlgError:
            raise NumericalError(
                f"singular regularized covariance for class {train.class_names[r]}") from None
        Z = sla.solve_triangular(L, X - stats.means[:, [r]], lower=True)
        logdet = 2.0 * np.sum(np.log(np.diag(L)))
        scores[r] = np.log(stats.sizes[r] / n) - 0.5 * logdet - 0.5 * np.sum(Z * Z, axis=0)
    return np.argmax(scores, axis=0) + 1


def cdm_weights(train):
    """Training-set confusion rates ``n_{l|r} / n_r`` of a regularized QDA."""
    sizes = train.class_sizes()
    if np.any(sizes < 2):
        raise InvalidInputError("CDM weights need at least 2 samples per class")
    c = train.n_classes
    pred = qda_predict(train)
    counts = np.zeros((c, c))
    np.add.at(counts, (train.labels - 1, pred - 1), 1.0)
    np.fill_diagonal(counts, 0.0)
    return WeightMatrix(counts / sizes[:, None], "cdm")


def knn_weights(dist, k):
    """``alpha[r, l] = 1`` for the ``k`` class means nearest to ``mu_r``.

    Equidistant neighbours are taken in increasing class index.
    """
    dist = np.asarray(dist, dtype=np.float64)
    c = dist.shape[0]
    if c < 2:
        raise InvalidParameterError("kNN weights need at least 2 classes")
    if int(k) != k or not 1 <= k <= c - 1:
        raise InvalidParameterError(f"k must lie in [1, {c - 1}], got {k}")
    alpha = np.zeros((c, c))
    for r in range(c):
        others = [l for l in range(c) if l != r]
        others.sort(key=lambda l: (dist[r, l], l))
        alpha[r, others[:int(k)]] = 1.0
    return WeightMatrix(alpha, f"knn(k={int(k)})")


def _cosine_normalized(G):
    diag = np.diag(G).copy()
    if np.any(diag <= 0):
        r = int(np.flatnonzero(diag <= 0)[0])
        return None, r
    norm = np.sqrt(diag)
    K = G / norm[:, None] / norm[None, :]
    return K, None


def cosine_weights(stats):
    """``alpha = (1 + cos(mu_r, mu_l)) / 2``, symmetric, zero diagonal."""
    M = stats.means
    K, bad = _cosine_normalized(M.T @ M)
    if K is None:
        raise DegenerateGeometryError(
            f"class {bad + 1} has a zero-norm mean; cosine weights are undefined "
            "(check whether standardization shifted that mean onto the origin)")
    alpha = np.clip(0.5 * (1.0 + K), 0.0, 1.0)
    alpha = np.triu(alpha, 1)
    return WeightMatrix(alpha + alpha.T, "cosine")


def kernel_cosine_weights(stats, kernel):
    """Normalized kernel between class means, ``K_rl / sqrt(K_rr K_ll)``.

    Negative values (possible for linear or polynomial kernels) are clipped to 0.
    """
    from .kfda import gram

    G = gram(kernel, stats.means, stats.means)
    K, bad = _cosine_normalized(0.5 * (G + G.T))
    if K is None:
        raise InvalidInputError(
            f"kernel value k(mu_{bad + 1}, mu_{bad + 1}) is not positive")
    alpha = np.triu(np.clip(K, 0.0, 1.0), 1)
    return WeightMatrix(alpha + alpha.T, "kernel-cosine")


def write_weights_csv(W, path):
    """Headerless CSV, one row per class, 17 significant digits."""
    alpha = np.asarray(getattr(W, "alpha", W), dtype=np.float64)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in alpha:
            writer.writerow([f"{v:.17g}" for v in row])


def read_weights_csv(path):
    try:
        with open(path, newline="") as fh:
            rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
    except (OSError, ValueError) as exc:
        raise IngestionError(f"{path}: cannot read weights ({exc})") from exc
    return WeightMatrix(np.array(rows), "file")
