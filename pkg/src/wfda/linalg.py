"""Numerical kernels: symmetric-definite generalized eigensolver, error
function, and vectorization utilities.
"""
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla
from scipy import special

from .errors import InvalidInputError, NumericalError

DEFAULT_RIDGE = 1e-6
SYMMETRY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class GeneralizedEigenResult:
    """Eigenpairs of ``A v = lambda (B + shift I) v``, eigenvalues descending.

    Columns of ``eigenvectors`` are orthonormal in the ``B + shift I`` inner
    product.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    shift: float


def _check_symmetric(M, name):
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError(f"{name} contains non-finite values")
    scale = max(1.0, float(np.max(np.abs(M), initial=0.0)))
    asym = float(np.max(np.abs(M - M.T), initial=0.0))
    if asym > SYMMETRY_TOL * scale:
        raise InvalidInputError(f"{name} is not symmetric (max |M - M^T| = {asym:.3e})")
    return 0.5 * (M + M.T)


def ridge_shift(B, ridge):
    """Spectral shift ``ridge * trace(B) / m`` (``1e-12`` if the trace is not positive)."""
    if ridge < 0:
        raise InvalidInputError("ridge must be non-negative")
    m = B.shape[0]
    tr = float(np.trace(B))
    if tr <= 0:
        return 1e-12
    return ridge * tr / m


def _fix_signs(V):
    # largest-magnitude entry of each column positive; argmax picks the lowest index on ties
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


class CholeskyEigensolver:
    """Factor ``B + shift I = L L^T`` once and solve many problems ``(A, B)``.

    Each solve forms ``C = L^{-1} A L^{-T}``, diagonalizes it and maps the
    eigenvectors back with ``L^{-T}``.
    """

    def __init__(self, B, ridge=DEFAULT_RIDGE):
        B = _check_symmetric(B, "B")
        self.m = B.shape[0]
        self.shift = ridge_shift(B, ridge)
        B_reg = B + self.shift * np.eye(self.m)
        try:
            self.L = sla.cholesky(B_reg, lower=True, check_finite=False)
        except sla.LinAlgError:
            w = sla.eigvalsh(B_reg)
            raise NumericalError(
                f"regularized matrix not positive definite (shift {self.shift:.3e}, "
                f"min eigenvalue {w[0]:.3e}); increase ridge") from None
        self.B_reg = B_reg

    def solve(self, A, n_leading=None):
        A = _check_symmetric(A, "A")
        if A.shape != (self.m, self.m):
            raise InvalidInputError(
                f"dimension mismatch: A is {A.shape}, B is {(self.m, self.m)}")
        tmp = sla.solve_triangular(self.L, A, lower=True, check_finite=False)
        C = sla.solve_triangular(self.L, tmp.T, lower=True, check_finite=False)
        C = 0.5 * (C + C.T)
        if n_leading is None or n_leading >= self.m:
            w, Z = sla.eigh(C, check_finite=False)
        else:
            w, Z = sla.eigh(C, subset_by_index=(self.m - n_leading, self.m - 1),
                            check_finite=False)
        w, Z = w[::-1], Z[:, ::-1]
        V = sla.solve_triangular(self.L, Z, lower=True, trans="T", check_finite=False)
        return GeneralizedEigenResult(w.copy(), _fix_signs(V), self.shift)


def generalized_eig(A, B, ridge=DEFAULT_RIDGE, n_leading=None):
    """Solve ``A v = lambda (B + eps I) v`` for symmetric ``A`` and ``B``.

    ``eps = ridge * trace(B) / m``. Eigenvalues are returned in descending
    order; each eigenvector is ``B + eps I``-normalized and signed so that its
    largest-magnitude component is positive. ``n_leading`` limits the output to
    the leading eigenpairs.
    """
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.shape != B.shape:
        raise InvalidInputError(f"dimension mismatch: A is {A.shape}, B is {B.shape}")
    return CholeskyEigensolver(B, ridge).solve(A, n_leading)


def erf(x):
    """Error function, odd by construction; accepts scalars or arrays."""
    x = np.asarray(x, dtype=np.float64)
    out = np.sign(x) * special.erf(np.abs(x))
    return float(out) if out.ndim == 0 else out


def vec(M):
    """Stack the columns of ``M`` into a vector."""
    M = np.asarray(M)
    if M.ndim != 2:
        raise InvalidInputError("vec expects a matrix")
    return M.reshape(-1, order="F")


def devec(v, rows, cols):
    """Inverse of :func:`vec`."""
    v = np.asarray(v)
    if v.ndim != 1 or v.size != rows * cols:
        raise InvalidInputError(f"cannot reshape length {v.size} into {rows}x{cols}")
    return v.reshape(rows, cols, order="F")


def kron(A, B):
    A, B = np.asarray(A), np.asarray(B)
    if A.ndim != 2 or B.ndim != 2:
        raise InvalidInputError("kron expects matrices")
    return np.kron(A, B)
