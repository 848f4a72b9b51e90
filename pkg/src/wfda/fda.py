"""Fisher discriminant analysis and manually weighted FDA in the input space."""
from dataclasses import dataclass

import numpy as np

from .dataset import ClassStatistics, Standardizer, class_statistics, standardize_fit
from .errors import DegenerateWeightsError, InvalidInputError
from .linalg import DEFAULT_RIDGE, CholeskyEigensolver
from .model import INPUT_SPACE, DiscriminantModel, check_p, project  # noqa: F401
from .scatter import pair_scatter, weight_array, within_scatter


def input_rank_bound(d, n, c):
    return min(d, n - 1, c - 1)


@dataclass(frozen=True, eq=False)
class InputProblem:
    """Standardized training data with its class statistics and ``S_W``."""

    samples: np.ndarray
    labels: np.ndarray
    standardizer: Standardizer
    stats: ClassStatistics
    s_w: np.ndarray
    class_names: tuple


def prepare_input_problem(train, standardize=False):
    if train.n_classes < 2:
        raise InvalidInputError("FDA needs at least 2 classes")
    std = standardize_fit(train) if standardize else Standardizer.identity(train.n_features)
    data = train.with_samples(std.apply(train.samples))
    stats = class_statistics(data)
    return InputProblem(data.samples, data.labels, std, stats, within_scatter(stats),
                        train.class_names)


def fit_weighted_fda(train, W, p=None, ridge=DEFAULT_RIDGE, standardize=False,
                     method="w-fda"):
    """Leading ``p`` generalized eigenvectors of ``(weighted S_B, S_W)``.

    ``W`` is a WeightMatrix, a ``c x c`` array, or a callable receiving the
    :class:`InputProblem` (so weights can be computed on standardized data).
    With ``standardize=True`` a :class:`Standardizer` is fitted on ``train``
    and stored in the model; otherwise the data are used as given.
    """
    problem = prepare_input_problem(train, standardize)
    bound = input_rank_bound(train.n_features, train.n_samples, train.n_classes)
    p = check_p(p, bound, "bound min(d, n-1, c-1)")
    if callable(W):
        W = W(problem)
    alpha = weight_array(W, train.n_classes)
    if not np.any(alpha):
        scheme = getattr(W, "scheme", "given")
        raise DegenerateWeightsError(f"{scheme} weights are all zero; the between scatter vanishes")
    s_b = pair_scatter(problem.stats.diffs, problem.stats.sizes, alpha)
    sol = CholeskyEigensolver(problem.s_w, ridge).solve(s_b, n_leading=p)
    return DiscriminantModel(
        kind=INPUT_SPACE,
        basis=sol.eigenvectors[:, :p],
        eigenvalues=sol.eigenvalues[:p],
        standardizer=problem.standardizer,
        method=method,
        shift=sol.shift,
        weights=alpha,
        class_names=train.class_names,
        params={"ridge": ridge},
    )


def fit_fda(train, p=None, ridge=DEFAULT_RIDGE, standardize=False):
    """Plain FDA: generalized eigenproblem ``(S_B, S_W)``.

    ``p`` defaults to ``min(d, n-1, c-1)``; ``ridge`` scales the spectral shift
    added to ``S_W``.
    """
    c = train.n_classes
    return fit_weighted_fda(train, np.ones((c, c)), p, ridge, standardize, "fda")
