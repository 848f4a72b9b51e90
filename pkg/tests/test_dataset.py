import numpy as np
import pytest

from wfda.dataset import (LabeledDataset, SplitSpec, class_statistics, ingest_csv,
                          ingest_image_dir, make_gaussian_classes, natural_key, read_csv_matrix,
                          split, standardize_apply, standardize_fit)
from wfda.errors import IngestionError, InvalidInputError, InvalidParameterError
from wfda.pgm import write_pgm


def test_fix_a_means_and_sizes(fix_a_stats):
    np.testing.assert_array_equal(fix_a_stats.means, [[1, 3, 2], [1, 1, 4]])
    np.testing.assert_array_equal(fix_a_stats.size_matrix, np.diag([2, 2, 2]))
    # diffs[r][:, l] = mu_r - mu_l
    np.testing.assert_array_equal(fix_a_stats.diffs[0][:, 1], [-2, 0])
    np.testing.assert_array_equal(fix_a_stats.diffs[2][:, 0], [1, 3])
    assert np.all(fix_a_stats.diffs[1][:, 1] == 0)


def test_centered_blocks_have_zero_mean(fix_a_stats):
    for block in fix_a_stats.centered:
        np.testing.assert_allclose(block.mean(axis=1), 0, atol=1e-15)


@pytest.mark.parametrize("labels", [[0, 1, 1], [1, 2, 4], [1.5, 2, 2]])
def test_bad_labels_rejected(labels):
    with pytest.raises(InvalidInputError):
        LabeledDataset(np.zeros((2, 3)), np.array(labels), ("a", "b", "c"))


def test_non_finite_samples_rejected():
    X = np.array([[1.0, np.nan]])
    with pytest.raises(InvalidInputError):
        LabeledDataset(X, np.array([1, 2]), ("a", "b"))


def test_empty_class_rejected_by_statistics():
    data = LabeledDataset(np.zeros((1, 2)), np.array([1, 1]), ("a", "b"))
    with pytest.raises(InvalidInputError, match="b"):
        class_statistics(data)


def test_standardize_population_std():
    X = np.array([[1.0, 2.0, 3.0, 4.0], [5.0, 5.0, 7.0, 7.0]])
    data = LabeledDataset(X, np.array([1, 1, 2, 2]), ("a", "b"))
    s = standardize_fit(data)
    np.testing.assert_allclose(s.mean, [2.5, 6.0])
    np.testing.assert_allclose(s.stddev, [np.sqrt(1.25), 1.0])
    Z = standardize_apply(s, data).samples
    np.testing.assert_allclose(Z.mean(axis=1), 0, atol=1e-15)
    np.testing.assert_allclose(Z.std(axis=1), 1)


def test_standardize_constant_feature_warns():
    X = np.array([[1.0, 2.0, 3.0], [4.0, 4.0, 4.0]])
    data = LabeledDataset(X, np.array([1, 1, 2]), ("a", "b"))
    with pytest.warns(RuntimeWarning):
        s = standardize_fit(data)
    assert np.all(np.isfinite(s.apply(X)))


def test_standardize_needs_two_samples():
    with pytest.raises(InvalidInputError):
        standardize_fit(LabeledDataset(np.ones((2, 1)), np.array([1]), ("a",)))


def test_fix_a_split_one_each(fix_a):
    train, test = split(fix_a, SplitSpec(0.66, seed=0))
    np.testing.assert_array_equal(train.class_sizes(), [1, 1, 1])
    np.testing.assert_array_equal(test.class_sizes(), [1, 1, 1])


def test_split_counts_round_half_up_and_clamp():
    labels = np.repeat([1, 2, 3], [10, 3, 2])
    data = LabeledDataset(np.arange(15.0)[None, :], labels, ("a", "b", "c"))
    train, test = split(data, SplitSpec(0.65, seed=3))
    # 6.5 -> 7, 1.95 -> 2, 1.3 -> 1
    np.testing.assert_array_equal(train.class_sizes(), [7, 2, 1])
    np.testing.assert_array_equal(test.class_sizes(), [3, 1, 1])
    allcols = np.sort(np.concatenate([train.samples[0], test.samples[0]]))
    np.testing.assert_array_equal(allcols, np.arange(15.0))


def test_split_deterministic_and_order_preserving():
    data = make_gaussian_classes(3, 9, 2, seed=4)
    a = split(data, SplitSpec(seed=11))
    b = split(data, SplitSpec(seed=11))
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x.samples, y.samples)
    c = split(data, SplitSpec(seed=12))
    assert not np.array_equal(a[0].samples, c[0].samples)
    # columns keep their original relative order
    first = data.samples[0]
    pos = [int(np.flatnonzero(first == v)[0]) for v in a[0].samples[0]]
    assert pos == sorted(pos)


@pytest.mark.parametrize("kw", [{"train_fraction": 0.0}, {"train_fraction": 1.0},
                                {"seed": -1}])
def test_split_spec_validation(kw):
    with pytest.raises(InvalidParameterError):
        SplitSpec(**kw)


def test_natural_key_order():
    names = ["s10", "s2", "s1", "s21"]
    assert sorted(names, key=natural_key) == ["s1", "s2", "s10", "s21"]


def test_ingest_csv_label_by_name(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("x,label,y\n1,b,2\n3,a,4\n5,b,6\n")
    data = ingest_csv(str(path), "label", header=True)
    np.testing.assert_array_equal(data.samples, [[1, 3, 5], [2, 4, 6]])
    np.testing.assert_array_equal(data.labels, [2, 1, 2])
    assert data.class_names == ("a", "b")


def test_ingest_csv_label_by_index(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("1,2,c10\n3,4,c9\n")
    data = ingest_csv(str(path), -1)
    assert data.class_names == ("c9", "c10")
    np.testing.assert_array_equal(data.labels, [2, 1])


def test_csv_errors_name_record_and_field(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,2,a\n3,oops,b\n")
    with pytest.raises(IngestionError, match=r"record 2, field 2"):
        read_csv_matrix(str(path), 2)
    path.write_text("1,2,a\n3,b\n")
    with pytest.raises(IngestionError, match="record 2 has 2 fields"):
        read_csv_matrix(str(path), 2)
    with pytest.raises(IngestionError, match="not found"):
        read_csv_matrix(str(path), "label")
    with pytest.raises(IngestionError):
        read_csv_matrix(str(tmp_path / "missing.csv"))


def test_ingest_image_dir(tmp_path):
    rng = np.random.default_rng(0)
    for cls in ["s10", "s2"]:
        (tmp_path / cls).mkdir()
        for k in (1, 2):
            write_pgm(str(tmp_path / cls / f"{k}.pgm"),
                      rng.integers(0, 256, size=(8, 6)).astype(np.uint8))
    data = ingest_image_dir(str(tmp_path), width=3, height=4)
    assert data.samples.shape == (12, 4)
    assert data.class_names == ("s2", "s10")
    one = ingest_image_dir(str(tmp_path), width=3, height=4, max_classes=1)
    assert one.class_names == ("s2",)
    with pytest.raises(IngestionError):
        ingest_image_dir(str(tmp_path / "s2"), 3, 4)
