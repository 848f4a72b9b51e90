"""Hot kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports and ``WFDA_NUMBA`` is not set to a
false value ("0", "false", "no", "off"). ``WFDA_THREADS`` caps the number of
numba worker threads (0 or unset means numba's default).

Both paths compute squared distances by explicit differences, so identical
points always give a distance of exactly zero.
"""
import os

import numpy as np
from scipy.spatial.distance import cdist

try:
    import numba
    from numba import njit, prange
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False


def _env_flag(name, default=True):
    value = os.environ.get(name)
    if value is None:
        return default
    return value.strip().lower() not in ("0", "false", "no", "off", "")


USE_NUMBA = HAS_NUMBA and _env_flag("WFDA_NUMBA")


def thread_cap():
    """Return the ``WFDA_THREADS`` cap (0 = automatic)."""
    raw = os.environ.get("WFDA_THREADS", "0").strip() or "0"
    try:
        value = int(raw)
    except ValueError:
        return 0
    return max(value, 0)


def set_backend(use_numba):
    """Select the numba (True) or numpy (False) path; returns the previous flag."""
    global USE_NUMBA
    previous = USE_NUMBA
    USE_NUMBA = bool(use_numba) and HAS_NUMBA
    return previous


if HAS_NUMBA:
    # tbb is tried first by default and warns when the installed one is too old
    if "NUMBA_THREADING_LAYER" not in os.environ:
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]
    # reassociation lets the distance reductions vectorize; inf/nan semantics
    # stay intact so the nearest-neighbour sentinel still works
    _FASTMATH = {"reassoc", "contract"}
    _cap = thread_cap()
    if _cap:
        numba.set_num_threads(min(_cap, numba.config.NUMBA_NUM_THREADS))

    @njit(parallel=True, cache=True, fastmath=_FASTMATH)
    def _sqdist_numba(A, B):
        # A: m1 x d, B: m2 x d (C-contiguous)
        m1, d = A.shape
        m2 = B.shape[0]
        out = np.empty((m1, m2))
        for i in prange(m1):
            for j in range(m2):
                acc = 0.0
                for t in range(d):
                    diff = A[i, t] - B[j, t]
                    acc += diff * diff
                out[i, j] = acc
        return out

    @njit(parallel=True, cache=True, fastmath=_FASTMATH)
    def _rbf_numba(A, B, gamma):
        m1, d = A.shape
        m2 = B.shape[0]
        out = np.empty((m1, m2))
        for i in prange(m1):
            for j in range(m2):
                acc = 0.0
                for t in range(d):
                    diff = A[i, t] - B[j, t]
                    acc += diff * diff
                out[i, j] = np.exp(-gamma * acc)
        return out

    @njit(parallel=True, cache=True, fastmath=_FASTMATH)
    def _nearest_numba(train, query, exclude_self):
        n, d = train.shape
        m = query.shape[0]
        out = np.empty(m, dtype=np.int64)
        for i in prange(m):
            best = np.inf
            best_j = -1
            for j in range(n):
                if exclude_self and j == i:
                    continue
                acc = 0.0
                for t in range(d):
                    diff = query[i, t] - train[j, t]
                    acc += diff * diff
                # strict comparison keeps the lowest index on ties
                if acc < best:
                    best = acc
                    best_j = j
            out[i] = best_j
        return out


def _rows(X):
    # samples-as-columns (d x m) -> C-contiguous m x d
    return np.ascontiguousarray(np.asarray(X, dtype=np.float64).T)


def sqdist_numpy(X1, X2):
    return cdist(_rows(X1), _rows(X2), "sqeuclidean")


def rbf_gram_numpy(X1, X2, gamma):
    return np.exp(-gamma * sqdist_numpy(X1, X2))


def nearest_numpy(train, query, exclude_self=False):
    D = sqdist_numpy(train, query).T
    if exclude_self:
        np.fill_diagonal(D, np.inf)
    return np.argmin(D, axis=1)


def sqdist(X1, X2):
    """Squared Euclidean distances between the columns of ``X1`` and ``X2``."""
    if USE_NUMBA:
        return _sqdist_numba(_rows(X1), _rows(X2))
    return sqdist_numpy(X1, X2)


def rbf_gram(X1, X2, gamma):
    """``exp(-gamma * ||x - y||^2)`` over column pairs."""
    if USE_NUMBA:
        return _rbf_numba(_rows(X1), _rows(X2), float(gamma))
    return rbf_gram_numpy(X1, X2, gamma)


def nearest(train, query, exclude_self=False):
    """Index of the nearest training column for every query column.

    Ties resolve to the lowest training index. With ``exclude_self`` the query
    is assumed to be the training set and column ``i`` never matches itself.
    """
    if exclude_self and np.shape(train) != np.shape(query):
        raise ValueError("exclude_self requires query to be the training set")
    if USE_NUMBA:
        return _nearest_numba(_rows(train), _rows(query), bool(exclude_self))
    return nearest_numpy(train, query, exclude_self)
