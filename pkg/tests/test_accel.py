import numpy as np
import pytest

from wfda import _accel


def _data(seed=0):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((7, 30)), rng.standard_normal((7, 12))


def test_sqdist_and_rbf(backend):
    X, Q = _data()
    ref = ((X[:, :, None] - Q[:, None, :]) ** 2).sum(axis=0)
    np.testing.assert_allclose(_accel.sqdist(X, Q), ref, rtol=1e-12)
    np.testing.assert_allclose(_accel.rbf_gram(X, Q, 0.3), np.exp(-0.3 * ref), rtol=1e-12)
    assert np.all(np.diag(_accel.sqdist(X, X)) == 0.0)


def test_nearest_matches_brute_force(backend):
    X, Q = _data(1)
    D = ((X[:, :, None] - Q[:, None, :]) ** 2).sum(axis=0)
    np.testing.assert_array_equal(_accel.nearest(X, Q), np.argmin(D, axis=0))
    D = ((X[:, :, None] - X[:, None, :]) ** 2).sum(axis=0)
    np.fill_diagonal(D, np.inf)
    np.testing.assert_array_equal(_accel.nearest(X, X, exclude_self=True), np.argmin(D, axis=0))


def test_nearest_ties_lowest_index(backend):
    train = np.array([[2.0, -1.0, 1.0, 1.0]])
    assert list(_accel.nearest(train, np.array([[0.0, 1.0]]))) == [1, 2]
    # duplicate training points: leave-one-out picks the other copy
    dup = np.array([[0.0, 0.0, 5.0]])
    assert list(_accel.nearest(dup, dup, exclude_self=True)) == [1, 0, 0]


def test_backends_agree():
    if not _accel.HAS_NUMBA:
        pytest.skip("numba not installed")
    X, Q = _data(2)
    prev = _accel.set_backend(True)
    try:
        a = (_accel.sqdist(X, Q), _accel.nearest(X, Q, False))
        _accel.set_backend(False)
        b = (_accel.sqdist(X, Q), _accel.nearest(X, Q, False))
    finally:
        _accel.set_backend(prev)
    np.testing.assert_allclose(a[0], b[0], rtol=1e-12)
    np.testing.assert_array_equal(a[1], b[1])


def test_env_flag_parsing(monkeypatch):
    monkeypatch.setenv("WFDA_X", "0")
    assert not _accel._env_flag("WFDA_X")
    monkeypatch.setenv("WFDA_X", "yes")
    assert _accel._env_flag("WFDA_X")
    monkeypatch.delenv("WFDA_X")
    assert _accel._env_flag("WFDA_X")
    monkeypatch.setenv("WFDA_THREADS", "3")
    assert _accel.thread_cap() == 3
    monkeypatch.setenv("WFDA_THREADS", "many")
    assert _accel.thread_cap() == 0


def test_env_flag_selects_backend_at_import():
    import os
    import subprocess
    import sys
    code = "from wfda import _accel; print(_accel.USE_NUMBA)"
    env = dict(os.environ, WFDA_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "False"
