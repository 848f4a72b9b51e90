import numpy as np
import pytest

from wfda.dataset import LabeledDataset, SplitSpec, class_statistics, make_gaussian_classes, split
from wfda.errors import DegenerateWeightsError, InvalidInputError, InvalidParameterError, UnsupportedOperationError
from wfda.evaluate import evaluate_model
from wfda.fda import fit_fda
from wfda.kfda import (KernelSpec, feature_between_scatter, feature_within_scatter, fit_kfda,
                       fit_weighted_kfda, gram, kernel_class_quantities,
                       weighted_feature_between_scatter)
from wfda.model import kernel_project, project
from wfda.scatter import between_scatter, weighted_between_scatter, within_scatter

LINEAR = KernelSpec("linear")


def test_linear_gram_entry(fix_a):
    K = gram(LINEAR, fix_a.samples, fix_a.samples)
    assert K[0, 2] == 3.0
    np.testing.assert_array_equal(K, fix_a.samples.T @ fix_a.samples)


def test_polynomial_and_rbf_gram(fix_a):
    X = fix_a.samples
    P = gram(KernelSpec("polynomial", degree=3, coef0=0.5), X, X)
    np.testing.assert_allclose(P, (X.T @ X + 0.5) ** 3)
    R = gram(KernelSpec("rbf", 0.1), X, X)
    assert R[0, 2] == pytest.approx(np.exp(-0.4))
    with pytest.raises(InvalidParameterError):
        gram(KernelSpec("rbf"), X, X)
    with pytest.raises(InvalidInputError):
        gram(LINEAR, X, np.ones((3, 2)))


def test_gamma_heuristic():
    X = np.array([[0.0, 2.0, 4.0], [1.0, 1.0, 1.0]])
    k = KernelSpec("rbf").resolve(X)
    # mean variance (8/3 + 0) / 2 = 4/3; gamma = 1 / (2 * 4/3)
    assert k.gamma == pytest.approx(3 / 8)
    assert KernelSpec("rbf", 2.0).resolve(X).gamma == 2.0


def test_kernel_spec_validation():
    with pytest.raises(InvalidParameterError):
        KernelSpec("sigmoid")
    with pytest.raises(InvalidParameterError):
        KernelSpec("rbf", -1.0)
    with pytest.raises(InvalidParameterError):
        KernelSpec("polynomial", degree=0)
    k = KernelSpec("polynomial", degree=3, coef0=2.0)
    assert KernelSpec.from_dict(k.to_dict()) == k


def test_linear_pullback_identities(fix_a):
    X = fix_a.samples
    q = kernel_class_quantities(gram(LINEAR, X, X), fix_a.labels)
    stats = class_statistics(fix_a)
    np.testing.assert_allclose(q.xi, X.T @ stats.means, atol=1e-12)
    np.testing.assert_allclose(feature_between_scatter(q), X.T @ between_scatter(stats) @ X,
                               atol=1e-9)
    np.testing.assert_allclose(feature_within_scatter(q), X.T @ within_scatter(stats) @ X,
                               atol=1e-9)


def test_linear_pullback_random_weighted():
    rng = np.random.default_rng(3)
    data = make_gaussian_classes(4, 5, 3, seed=8)
    X = data.samples
    q = kernel_class_quantities(gram(LINEAR, X, X), data.labels)
    stats = class_statistics(data)
    alpha = rng.random((4, 4))
    np.testing.assert_allclose(weighted_feature_between_scatter(q, alpha),
                               X.T @ weighted_between_scatter(stats, alpha) @ X, atol=1e-8)


def test_centering_matrix(fix_a):
    q = kernel_class_quantities(gram(LINEAR, fix_a.samples, fix_a.samples), fix_a.labels)
    H = q.centering(0)
    np.testing.assert_allclose(H, [[0.5, -0.5], [-0.5, 0.5]])
    np.testing.assert_allclose(q.blocks[0] @ H, q.blocks[0] - q.blocks[0].mean(1, keepdims=True))


def test_contract_feature_space():
    data = make_gaussian_classes(3, 8, 4, seed=1)
    m = fit_kfda(data, KernelSpec("rbf", 0.2))
    X = data.samples
    q = kernel_class_quantities(gram(m.kernel, X, X), data.labels)
    Dw = feature_within_scatter(q) + m.shift * np.eye(X.shape[1])
    np.testing.assert_allclose(m.basis.T @ Dw @ m.basis, np.eye(m.p), atol=1e-8)
    Db = feature_between_scatter(q)
    assert np.trace(m.basis.T @ Db @ m.basis) == pytest.approx(m.eigenvalues.sum(), rel=1e-8)


def test_out_of_sample_projection():
    data = make_gaussian_classes(3, 10, 4, seed=6)
    train, test = split(data, SplitSpec(seed=2))
    m = fit_kfda(train, KernelSpec("rbf"), standardize=True)
    Xt = (test.samples - m.standardizer.mean[:, None]) / m.standardizer.stddev[:, None]
    K = gram(m.kernel, m.train_samples, Xt)
    np.testing.assert_allclose(kernel_project(m, test.samples), m.basis.T @ K, atol=1e-12)
    with pytest.raises(UnsupportedOperationError):
        project(m, test.samples)


def test_linear_kfda_matches_fda_accuracy():
    # d > n, so the training columns have full column rank
    rng = np.random.default_rng(4)
    centers = rng.normal(scale=1.5, size=(40, 3))
    cols = [centers[:, [r]] + rng.standard_normal((40, 9)) for r in range(3)]
    data = LabeledDataset(np.hstack(cols), np.repeat([1, 2, 3], 9), ("a", "b", "c"))
    train, test = split(data, SplitSpec(0.66, seed=0))
    assert np.linalg.matrix_rank(train.samples) == train.n_samples
    a = evaluate_model(fit_fda(train), train, test)
    b = evaluate_model(fit_kfda(train, LINEAR), train, test)
    assert a == b


def test_feature_rank_bound(fix_a):
    with pytest.raises(InvalidParameterError, match=r"\[1, 2\]"):
        fit_kfda(fix_a, LINEAR, p=3)


def test_all_zero_weights_rejected(fix_a):
    with pytest.raises(DegenerateWeightsError):
        fit_weighted_kfda(fix_a, LINEAR, np.zeros((3, 3)))
