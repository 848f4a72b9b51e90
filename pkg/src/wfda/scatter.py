"""Input-space scatter matrices.

The within-class scatter keeps the ``n_r`` multiplier on every class block,
``S_W = sum_r n_r Xc_r Xc_r^T``, so it is ``n_r`` times the usual definition.
Between-class scatters are assembled class by class as
``sum_r n_r M_r A_r N M_r^T``; the same assembly serves the feature-space
scatters in :mod:`wfda.kfda` with kernel mean differences in place of ``M_r``.
"""
import numpy as np

from .errors import DegenerateWeightsError, InvalidInputError


def weight_array(W, c):
    """Return the ``c x c`` float array behind a WeightMatrix or array-like."""
    alpha = np.asarray(getattr(W, "alpha", W), dtype=np.float64)
    if alpha.shape != (c, c):
        raise InvalidInputError(f"weight matrix must be {c}x{c}, got {alpha.shape}")
    if not np.all(np.isfinite(alpha)):
        raise InvalidInputError("weights must be finite")
    if np.any(alpha < 0):
        raise InvalidInputError("weights must be non-negative")
    return alpha


def normalize_rows(alpha, class_names=None):
    """Divide each row by its squared Euclidean norm (``A_r / ||A_r||_F^2``)."""
    sq = np.sum(alpha * alpha, axis=1)
    zero = np.flatnonzero(sq == 0)
    if zero.size:
        names = [class_names[i] if class_names else str(i + 1) for i in zero]
        raise DegenerateWeightsError(f"all-zero weight row for class(es) {', '.join(names)}")
    return alpha / sq[:, None]


def pair_scatter(diffs, sizes, alpha):
    """``sum_r n_r D_r diag(alpha_r) N D_r^T`` for difference blocks ``D_r``.

    ``diffs`` has shape ``(c, m, c)``; the result is ``m x m``. Summation runs
    over classes in index order.
    """
    c, m, _ = diffs.shape
    out = np.zeros((m, m))
    for r in range(c):
        coef = sizes[r] * alpha[r] * sizes
        if not np.any(coef):
            continue
        D = diffs[r]
        out += (D * coef) @ D.T
    return 0.5 * (out + out.T)


def within_scatter(stats):
    """``S_W = sum_r n_r Xc_r Xc_r^T``."""
    d = stats.n_features
    out = np.zeros((d, d))
    for n_r, Xc in zip(stats.sizes, stats.centered):
        out += n_r * (Xc @ Xc.T)
    return 0.5 * (out + out.T)


def between_scatter(stats):
    """``S_B = sum_r n_r M_r N M_r^T`` (every pair weighted 1)."""
    c = stats.n_classes
    return pair_scatter(stats.diffs, stats.sizes, np.ones((c, c)))


def weighted_between_scatter(stats, W):
    """``sum_r n_r M_r A_r N M_r^T`` with ``A_r = diag(W[r])``."""
    alpha = weight_array(W, stats.n_classes)
    return pair_scatter(stats.diffs, stats.sizes, alpha)


def normalized_weighted_between_scatter(stats, W):
    """Weighted between scatter with each ``A_r`` divided by ``||A_r||_F^2``."""
    alpha = normalize_rows(weight_array(W, stats.n_classes))
    return pair_scatter(stats.diffs, stats.sizes, alpha)
