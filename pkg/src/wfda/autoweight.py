"""Automatically weighted FDA / KFDA.

Alternates between

1. the projection: leading generalized eigenvectors of the row-normalized
   weighted between scatter against the within scatter, and
2. the weights: for every class ``r`` one Armijo-backtracked gradient step on
   the diagonal of ``A_r``, negative entries clipped to zero, then a hard
   threshold keeping the ``k`` largest entries.

The objective is ``f = -tr(B^T S B)`` where ``B`` is the basis (``U`` or
``Y``) and ``S`` the between scatter with ``A_r / ||A_r||_F^2`` in place of
``A_r``. Weights start at all ones, so the first projection is plain FDA/KFDA.

The derivative of the normalization ``A -> A / ||A||_F^2`` is
``(I - (2/s) vec(A) vec(A)^T) / s`` with ``s = ||A||_F^2``.
"""
import time
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DegenerateWeightsError, InvalidParameterError
from .fda import input_rank_bound, prepare_input_problem
from .kfda import _model_from_solution, feature_rank_bound, prepare_kernel_problem
from .linalg import DEFAULT_RIDGE, CholeskyEigensolver, devec, kron, vec
from .model import INPUT_SPACE, DiscriminantModel, check_p
from .scatter import normalize_rows, pair_scatter, weight_array
from .weighting import WeightMatrix


@dataclass(frozen=True)
class AwConfig:
    """Settings for the alternating optimization.

    ``k`` is the per-class sparsity budget (``None`` means ``c - 1``).
    """

    k: int = None
    max_outer_iters: int = 50
    tol: float = 1e-6
    armijo: float = 1e-4
    backtrack: float = 0.5
    initial_step: float = 1.0
    max_backtracks: int = 30
    init_weights: str = "uniform_ones"

    def __post_init__(self):
        if self.k is not None and (int(self.k) != self.k or self.k < 1):
            raise InvalidParameterError(f"sparsity budget k must be a positive integer, got {self.k}")
        if int(self.max_outer_iters) != self.max_outer_iters or self.max_outer_iters < 1:
            raise InvalidParameterError("max_outer_iters must be a positive integer")
        if not self.tol > 0:
            raise InvalidParameterError("tol must be positive")
        if not 0 < self.armijo < 1:
            raise InvalidParameterError("Armijo constant must lie in (0, 1)")
        if not 0 < self.backtrack < 1:
            raise InvalidParameterError("backtrack factor must lie in (0, 1)")
        if self.initial_step < 0:
            raise InvalidParameterError("initial step must be non-negative")
        if int(self.max_backtracks) != self.max_backtracks or self.max_backtracks < 0:
            raise InvalidParameterError("max_backtracks must be a non-negative integer")
        if self.init_weights != "uniform_ones":
            raise InvalidParameterError(f"unknown weight initialization {self.init_weights!r}")

    def resolved_k(self, c):
        k = c - 1 if self.k is None else int(self.k)
        if not 1 <= k <= c:
            raise InvalidParameterError(f"sparsity budget k must lie in [1, {c}], got {k}")
        return k


@dataclass
class FitReport:
    objective_trace: list = field(default_factory=list)
    converged: bool = False
    iterations: int = 0
    weights: WeightMatrix = None
    stalled_steps: int = 0
    recoveries: int = 0
    elapsed_seconds: float = 0.0

    def to_dict(self, timing=True):
        out = {
            "iterations": self.iterations,
            "converged": self.converged,
            "objective_trace": [float(v) for v in self.objective_trace],
            "stalled_steps": self.stalled_steps,
            "recoveries": self.recoveries,
        }
        if self.weights is not None:
            out["weights"] = [[float(v) for v in row] for row in self.weights.alpha]
        if timing:
            out["elapsed_seconds"] = self.elapsed_seconds
        return out


class LineSearchResult(NamedTuple):
    step: float
    value: float
    stalled: bool


def aw_objective(basis, quantities, W):
    """``-tr(B^T S B)`` with the row-normalized weighted between scatter ``S``.

    ``quantities`` is a ClassStatistics (input space) or KernelClassQuantities
    (feature space); both expose ``diffs`` and ``sizes``.
    """
    alpha = normalize_rows(weight_array(W, quantities.sizes.shape[0]))
    S = pair_scatter(quantities.diffs, quantities.sizes, alpha)
    basis = np.asarray(basis, dtype=np.float64)
    return -float(np.sum(basis * (S @ basis)))


def _outer_gradient(basis, D_r, sizes, r):
    """``n_r D_r^T (-B B^T) D_r N``: gradient of f w.r.t. the normalized ``A_r``."""
    P = basis.T @ D_r
    return -sizes[r] * (P.T @ P) * sizes[None, :]


def _grad_vec(basis, D_r, sizes, r, A):
    H = _outer_gradient(basis, D_r, sizes, r)
    s = float(np.sum(A * A))
    return (H - (2.0 / s) * np.sum(A * H) * A) / s


def _grad_kron(basis, D_r, sizes, r, A):
    c = A.shape[0]
    N = np.diag(sizes)
    s = float(np.sum(A * A))
    d_f_d_S = -(basis @ basis.T)
    d_S_d_An = sizes[r] * kron(D_r @ N.T, D_r)
    a = vec(A)
    d_An_d_A = (np.eye(c * c) - (2.0 / s) * np.outer(a, a)) / s
    return devec(d_An_d_A.T @ (d_S_d_An.T @ vec(d_f_d_S)), c, c)


def _weight_gradient(basis, quantities, W, r, form):
    c = quantities.sizes.shape[0]
    alpha = weight_array(W, c)
    A = np.diag(alpha[r])
    if not np.any(A):
        raise DegenerateWeightsError(f"weight row {r + 1} is all zero")
    basis = np.asarray(basis, dtype=np.float64)
    D_r = quantities.diffs[r]
    if form == "kron":
        return _grad_kron(basis, D_r, quantities.sizes, r, A)
    if form == "vec":
        return _grad_vec(basis, D_r, quantities.sizes, r, A)
    raise ValueError(f"unknown gradient form {form!r}")


def grad_weights_input(U, stats, W, r, form="vec"):
    """Gradient of the objective w.r.t. the full ``c x c`` matrix ``A_r``.

    ``r`` is a 0-based class index. ``form="kron"`` assembles the explicit
    Kronecker Jacobians (memory ``O(d^2 c^2)``); ``form="vec"`` applies the same
    linear maps through ``vec(A X B) = (B^T kron A) vec(X)``.
    """
    return _weight_gradient(U, stats, W, r, form)


def grad_weights_feature(Y, quantities, W, r, form="vec"):
    """Feature-space counterpart of :func:`grad_weights_input` (``Xi_r`` for ``M_r``)."""
    return _weight_gradient(Y, quantities, W, r, form)


def l0_project(a, k):
    """Keep the ``k`` largest-magnitude entries of ``a``; ties keep the lower index."""
    a = np.asarray(a, dtype=np.float64)
    c = a.shape[0]
    if int(k) != k or not 1 <= k <= c:
        raise InvalidParameterError(f"k must lie in [1, {c}], got {k}")
    if k == c:
        return a.copy()
    keep = np.argsort(-np.abs(a), kind="stable")[:int(k)]
    out = np.zeros_like(a)
    out[keep] = a[keep]
    return out


def backtracking_line_search(f_at, x, gradient, cfg):
    """Armijo backtracking along ``-gradient``.

    Tries ``eta = eta0 * beta^j`` for ``j = 0..max_backtracks`` and returns the
    first step with ``f(x - eta g) <= f(x) - c1 eta ||g||^2``. If none
    qualifies the result has ``step=0`` and ``stalled=True``.
    """
    g = np.asarray(gradient, dtype=np.float64)
    f0 = f_at(x)
    gsq = float(np.sum(g * g))
    if gsq == 0.0:
        return LineSearchResult(cfg.initial_step, f0, False)
    eta = cfg.initial_step
    for _ in range(cfg.max_backtracks + 1):
        f1 = f_at(x - eta * g)
        if f1 <= f0 - cfg.armijo * eta * gsq:
            return LineSearchResult(eta, f1, False)
        eta *= cfg.backtrack
    return LineSearchResult(0.0, f0, True)


def _row_objective(h):
    """Row-``r`` share of f as a function of the diagonal ``a`` of ``A_r``."""
    def f_at(a):
        s = float(np.dot(a, a))
        if s == 0.0:
            return np.inf
        return float(np.dot(a, h)) / s
    return f_at


def update_weights(basis, quantities, W, cfg, k, order=None):
    """One gradient step + clip + hard threshold on every row of ``W``.

    Rows are independent given the basis, so ``order`` does not affect the
    result. Returns ``(alpha, stalled, recoveries, steps)``.
    """
    alpha = np.array(weight_array(W, quantities.sizes.shape[0]))
    c = alpha.shape[0]
    new = alpha.copy()
    stalled = recoveries = 0
    steps = []
    for r in (range(c) if order is None else order):
        a = alpha[r]
        H = _outer_gradient(basis, quantities.diffs[r], quantities.sizes, r)
        g = np.diag(_grad_vec(basis, quantities.diffs[r], quantities.sizes, r, np.diag(a)))
        ls = backtracking_line_search(_row_objective(np.diag(H)), a, g, cfg)
        stalled += ls.stalled
        steps.append((r, ls))
        row = l0_project(np.maximum(a - ls.step * g, 0.0), k)
        if not np.any(row):
            keep = int(np.argmax(a))
            if a[keep] <= 0:
                raise DegenerateWeightsError(
                    f"weights of class {r + 1} collapsed to zero and cannot be restored")
            row[keep] = a[keep]
            recoveries += 1
        new[r] = row
    return new, stalled, recoveries, steps


def _alternate(quantities, solver, p, cfg, c):
    k = cfg.resolved_k(c)
    alpha = np.ones((c, c))
    report = FitReport()
    start = time.perf_counter()
    prev = None
    for it in range(cfg.max_outer_iters):
        S = pair_scatter(quantities.diffs, quantities.sizes, normalize_rows(alpha))
        sol = solver.solve(S, n_leading=p)
        basis = sol.eigenvectors[:, :p]
        f = -float(np.sum(basis * (S @ basis)))
        if not np.isfinite(f):
            raise DegenerateWeightsError(f"objective became non-finite at iteration {it + 1}")
        report.objective_trace.append(f)
        if prev is not None and abs(f - prev) / max(abs(f), 1.0) < cfg.tol:
            report.converged = True
            break
        prev = f
        if it == cfg.max_outer_iters - 1:
            break
        alpha, stalled, recovered, _ = update_weights(basis, quantities, alpha, cfg, k)
        report.stalled_steps += stalled
        report.recoveries += recovered
    report.iterations = len(report.objective_trace)
    report.weights = WeightMatrix(alpha, f"aw(k={k})")
    report.elapsed_seconds = time.perf_counter() - start
    return sol, report


def fit_aw_fda(train, p=None, cfg=None, ridge=DEFAULT_RIDGE, standardize=False):
    """AW-FDA in the input space; returns ``(model, report)``."""
    cfg = cfg or AwConfig()
    problem = prepare_input_problem(train, standardize)
    p = check_p(p, input_rank_bound(train.n_features, train.n_samples, train.n_classes),
                "bound min(d, n-1, c-1)")
    solver = CholeskyEigensolver(problem.s_w, ridge)
    sol, report = _alternate(problem.stats, solver, p, cfg, train.n_classes)
    model = DiscriminantModel(
        kind=INPUT_SPACE,
        basis=sol.eigenvectors[:, :p],
        eigenvalues=sol.eigenvalues[:p],
        standardizer=problem.standardizer,
        method=report.weights.scheme,
        shift=sol.shift,
        weights=np.array(report.weights.alpha),
        class_names=train.class_names,
        params={"ridge": ridge},
    )
    return model, report


def fit_aw_kfda(train, kernel, p=None, cfg=None, ridge=DEFAULT_RIDGE, standardize=False):
    """AW-KFDA in the feature space; returns ``(model, report)``."""
    cfg = cfg or AwConfig()
    problem = prepare_kernel_problem(train, kernel, standardize)
    p = check_p(p, feature_rank_bound(train.n_samples, train.n_classes), "bound min(n, c-1)")
    solver = CholeskyEigensolver(problem.delta_w, ridge)
    sol, report = _alternate(problem.quantities, solver, p, cfg, train.n_classes)
    model = _model_from_solution(problem, sol, p, "aw-kfda" + report.weights.scheme[2:],
                                 report.weights.alpha, {"ridge": ridge})
    return model, report
