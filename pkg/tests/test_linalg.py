import numpy as np
import pytest
from scipy import integrate, linalg as sla

from wfda.errors import InvalidInputError, NumericalError
from wfda.linalg import CholeskyEigensolver, devec, erf, generalized_eig, kron, ridge_shift, vec


def _spd(rng, m):
    G = rng.standard_normal((m, m))
    return G @ G.T + m * np.eye(m)


def test_fix_a_top_eigenpair():
    res = generalized_eig(np.diag([48.0, 144.0]), np.diag([4.0, 8.0]), ridge=0.0, n_leading=1)
    assert res.eigenvalues[0] == pytest.approx(18.0, rel=1e-12)
    np.testing.assert_allclose(res.eigenvectors[:, 0], [0, 1 / np.sqrt(8)], atol=1e-12)


def test_contract_on_random_problems():
    rng = np.random.default_rng(0)
    for _ in range(20):
        m = int(rng.integers(2, 8))
        G = rng.standard_normal((m, m))
        A = G @ G.T
        B = _spd(rng, m)
        res = generalized_eig(A, B)
        V, w = res.eigenvectors, res.eigenvalues
        Breg = B + res.shift * np.eye(m)
        np.testing.assert_allclose(V.T @ Breg @ V, np.eye(m), atol=1e-10)
        np.testing.assert_allclose(A @ V, Breg @ V * w, atol=1e-8 * np.abs(A).max())
        assert np.all(np.diff(w) <= 0)
        np.testing.assert_allclose(w, sla.eigh(A, Breg, eigvals_only=True)[::-1], rtol=1e-9,
                                   atol=1e-12)


def test_leading_subset_matches_full():
    rng = np.random.default_rng(1)
    A, B = _spd(rng, 6), _spd(rng, 6)
    full = generalized_eig(A, B)
    top = generalized_eig(A, B, n_leading=2)
    np.testing.assert_allclose(top.eigenvalues, full.eigenvalues[:2], rtol=1e-12)
    np.testing.assert_allclose(top.eigenvectors, full.eigenvectors[:, :2], atol=1e-10)


def test_sign_convention():
    rng = np.random.default_rng(2)
    res = generalized_eig(_spd(rng, 5), _spd(rng, 5))
    for v in res.eigenvectors.T:
        assert v[np.argmax(np.abs(v))] > 0


def test_shift_rule():
    B = np.diag([1.0, 3.0])
    assert ridge_shift(B, 1e-6) == pytest.approx(2e-6)
    assert ridge_shift(np.zeros((2, 2)), 1e-6) == 1e-12


def test_singular_within_is_regularized():
    # rank-one B; the ridge makes the pencil definite
    B = np.array([[1.0, 1.0], [1.0, 1.0]])
    res = generalized_eig(np.eye(2), B)
    assert np.all(np.isfinite(res.eigenvalues))


def test_indefinite_raises():
    with pytest.raises(NumericalError, match="min eigenvalue"):
        CholeskyEigensolver(np.diag([1.0, -5.0]))


def test_asymmetric_and_mismatched_inputs():
    with pytest.raises(InvalidInputError):
        generalized_eig(np.array([[1.0, 2.0], [0.0, 1.0]]), np.eye(2))
    with pytest.raises(InvalidInputError):
        generalized_eig(np.eye(3), np.eye(2))


def _erf_quad(x):
    val, _ = integrate.quad(lambda t: np.exp(-t * t), 0.0, x, epsabs=1e-14, epsrel=1e-13)
    return 2.0 / np.sqrt(np.pi) * val


def test_erf_against_quadrature_sample():
    xs = np.linspace(-6, 6, 241)
    ref = np.array([_erf_quad(x) for x in xs])
    assert np.max(np.abs(erf(xs) - ref)) <= 1.5e-7


def test_erf_odd_and_scalar():
    assert isinstance(erf(0.3), float)
    assert erf(-0.7) == -erf(0.7)
    assert erf(0.0) == 0.0


def test_vec_devec_kron_identity():
    rng = np.random.default_rng(3)
    A, X, B = rng.standard_normal((3, 4)), rng.standard_normal((4, 2)), rng.standard_normal((2, 5))
    np.testing.assert_allclose(vec(A @ X @ B), kron(B.T, A) @ vec(X), atol=1e-12)
    np.testing.assert_array_equal(devec(vec(X), 4, 2), X)
    # column-major stacking
    np.testing.assert_array_equal(vec(np.array([[1, 2], [3, 4]])), [1, 3, 2, 4])
    with pytest.raises(InvalidInputError):
        devec(np.arange(5.0), 2, 2)
