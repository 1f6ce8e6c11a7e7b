"""IDX/CSV loaders, preprocessing, and one-class split construction."""

import struct

import numpy as np
import pytest

from dasvdd.data import (
    DataFormatError,
    LabeledDataset,
    global_contrast_normalization,
    load_csv,
    load_idx,
    make_holdout_split,
    make_one_class_split,
    standardize,
)


def write_idx_pair(tmp_path, pixels, labels, rows, cols, image_magic=0x803, label_magic=0x801):
    """Serialize raw pixel bytes and labels into a paired IDX file set."""
    count = len(labels)
    img_path = tmp_path / "images-idx3-ubyte"
    lab_path = tmp_path / "labels-idx1-ubyte"
    img_path.write_bytes(
        struct.pack(">IIII", image_magic, count, rows, cols) + bytes(pixels)
    )
    lab_path.write_bytes(struct.pack(">II", label_magic, count) + bytes(labels))
    return img_path, lab_path


def test_load_idx_single_pixel(tmp_path):
    img, lab = write_idx_pair(tmp_path, [0xFF], [7], rows=1, cols=1)
    ds = load_idx(img, lab)
    assert ds.features.shape == (1, 1)
    assert ds.features[0, 0] == 1.0
    assert ds.labels.tolist() == [7]


def test_load_idx_flattens_row_major(tmp_path):
    img, lab = write_idx_pair(tmp_path, [0, 51, 102, 255], [3], rows=2, cols=2)
    ds = load_idx(img, lab)
    assert ds.features.shape == (1, 4)
    np.testing.assert_array_equal(ds.features[0], np.array([0, 51, 102, 255]) / 255.0)


def test_load_idx_reload_identical(tmp_path):
    rng = np.random.default_rng(31)
    pixels = rng.integers(0, 256, size=5 * 3 * 3).tolist()
    img, lab = write_idx_pair(tmp_path, pixels, [0, 1, 2, 1, 0], rows=3, cols=3)
    first = load_idx(img, lab)
    second = load_idx(img, lab)
    assert np.array_equal(first.features, second.features)
    assert np.array_equal(first.labels, second.labels)


def test_load_idx_rejects_label_magic_as_images(tmp_path):
    img, lab = write_idx_pair(tmp_path, [0xFF], [1], rows=1, cols=1, image_magic=0x801)
    with pytest.raises(DataFormatError, match="magic"):
        load_idx(img, lab)


def test_load_idx_rejects_bad_label_magic(tmp_path):
    img, lab = write_idx_pair(tmp_path, [0xFF], [1], rows=1, cols=1, label_magic=0x803)
    with pytest.raises(DataFormatError, match="magic"):
        load_idx(img, lab)


def test_load_idx_rejects_truncated_payload(tmp_path):
    img, lab = write_idx_pair(tmp_path, [0xFF] * 3, [1], rows=2, cols=2)
    with pytest.raises(DataFormatError, match="payload"):
        load_idx(img, lab)


def test_load_idx_rejects_count_mismatch(tmp_path):
    img, _ = write_idx_pair(tmp_path, [0xFF, 0x00], [1, 0], rows=1, cols=1)
    lab = tmp_path / "short-labels-idx1-ubyte"
    lab.write_bytes(struct.pack(">II", 0x801, 1) + bytes([1]))
    with pytest.raises(DataFormatError, match="count"):
        load_idx(img, lab)


def test_load_idx_missing_file(tmp_path):
    with pytest.raises(DataFormatError):
        load_idx(tmp_path / "nope", tmp_path / "nope2")


def test_load_csv_basic(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("1,2,0\n3,4,1\n")
    ds = load_csv(path)
    np.testing.assert_array_equal(ds.features, [[1.0, 2.0], [3.0, 4.0]])
    assert ds.labels.tolist() == [0, 1]


def test_load_csv_header_detected(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("alpha,beta,label\n1.5,2.5,0\n3.5,-4.5,1\n")
    ds = load_csv(path)
    np.testing.assert_array_equal(ds.features, [[1.5, 2.5], [3.5, -4.5]])
    assert ds.labels.tolist() == [0, 1]


def test_load_csv_errors(tmp_path):
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("1,2,0\n3,1\n")
    with pytest.raises(DataFormatError, match="ragged"):
        load_csv(ragged)
    bad_cell = tmp_path / "bad.csv"
    bad_cell.write_text("1,2,0\n3,x,1\n")
    with pytest.raises(DataFormatError, match="non-numeric"):
        load_csv(bad_cell)
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(DataFormatError, match="no data"):
        load_csv(empty)
    header_only = tmp_path / "header.csv"
    header_only.write_text("a,b,label\n")
    with pytest.raises(DataFormatError, match="header"):
        load_csv(header_only)
    frac_label = tmp_path / "frac.csv"
    frac_label.write_text("1,2,0.5\n")
    with pytest.raises(DataFormatError, match="integer"):
        load_csv(frac_label)


def test_gcn_constant_row_is_zero():
    out = global_contrast_normalization(np.full((2, 5), 3.7))
    assert np.array_equal(out, np.zeros((2, 5)))


def test_gcn_hand_value():
    out = global_contrast_normalization(np.array([[0.0, 2.0]]))
    np.testing.assert_array_equal(out, np.array([[-1.0, 1.0]]))


def test_gcn_zero_mean_unit_rms():
    rng = np.random.default_rng(32)
    out = global_contrast_normalization(rng.uniform(size=(20, 16)))
    assert np.abs(out.mean(axis=1)).max() < 1e-9
    rms = np.sqrt(np.mean(np.square(out), axis=1))
    assert np.abs(rms - 1.0).max() < 1e-9


def test_gcn_idempotent():
    rng = np.random.default_rng(33)
    x = rng.normal(size=(10, 8))
    once = global_contrast_normalization(x)
    twice = global_contrast_normalization(once)
    assert np.abs(twice - once).max() < 1e-9


def test_standardize_hand_values():
    train = np.array([[1.0], [3.0]])
    other = np.array([[2.0], [5.0]])
    train_s, other_s, mean, std = standardize(train, other)
    np.testing.assert_array_equal(train_s, [[-1.0], [1.0]])
    np.testing.assert_array_equal(other_s, [[0.0], [3.0]])
    assert mean[0] == 2.0 and std[0] == 1.0


def test_standardize_constant_column():
    train = np.full((4, 2), 5.0)
    train_s, other_s, _, std = standardize(train, train + 0.0)
    assert np.array_equal(train_s, np.zeros((4, 2)))
    assert (std == 1e-8).all()


def test_standardize_uses_train_stats_only():
    train = np.array([[0.0], [2.0]])  # mean 1, std 1
    other = np.array([[100.0], [200.0]])
    _, other_s, _, _ = standardize(train, other)
    np.testing.assert_array_equal(other_s, [[99.0], [199.0]])


def test_make_one_class_split_toy():
    train_ds = LabeledDataset(np.arange(6, dtype=float).reshape(3, 2), [0, 1, 1])
    test_ds = LabeledDataset(np.arange(4, dtype=float).reshape(2, 2), [0, 1])
    split = make_one_class_split(train_ds, test_ds, normal_class=1)
    assert split.train_normals.shape == (2, 2)
    assert split.test_labels.tolist() == [1, 0]
    assert split.normal_class == 1
    # subset property: each training row exists verbatim in the source
    source_rows = {tuple(row) for row in train_ds.features}
    assert all(tuple(row) in source_rows for row in split.train_normals)


def test_make_one_class_split_excludes_other_classes():
    rng = np.random.default_rng(34)
    features = rng.normal(size=(30, 3))
    labels = rng.integers(0, 3, size=30)
    labels[:3] = 1
    ds = LabeledDataset(features, labels)
    split = make_one_class_split(ds, ds, normal_class=1)
    normal_rows = {tuple(r) for r in features[labels == 1]}
    assert all(tuple(r) in normal_rows for r in split.train_normals)
    assert split.train_normals.shape[0] == int((labels == 1).sum())


def test_make_one_class_split_absent_class():
    ds = LabeledDataset(np.zeros((2, 2)), [0, 0])
    with pytest.raises(ValueError):
        make_one_class_split(ds, ds, normal_class=5)


def test_holdout_split_counts_and_labels():
    rng = np.random.default_rng(35)
    features = rng.normal(size=(100, 4))
    labels = np.array([0] * 80 + [1] * 20)
    ds = LabeledDataset(features, labels)
    split = make_holdout_split(ds, normal_class=0, train_fraction=0.8, seed=3)
    assert split.train_normals.shape[0] == 64  # 80% of the 80 normals
    assert split.test_features.shape[0] == 16 + 20
    assert split.test_labels.sum() == 20
    normal_rows = {tuple(r) for r in features[:80]}
    assert all(tuple(r) in normal_rows for r in split.train_normals)


def test_holdout_split_deterministic_and_seeded():
    ds = LabeledDataset(np.arange(40, dtype=float).reshape(20, 2), [0] * 15 + [1] * 5)
    a = make_holdout_split(ds, 0, seed=1)
    b = make_holdout_split(ds, 0, seed=1)
    c = make_holdout_split(ds, 0, seed=2)
    assert np.array_equal(a.train_normals, b.train_normals)
    assert not np.array_equal(a.train_normals, c.train_normals)


def test_holdout_split_validation():
    ds = LabeledDataset(np.zeros((4, 2)), [1, 1, 1, 1])
    with pytest.raises(ValueError):
        make_holdout_split(ds, normal_class=0)
    with pytest.raises(ValueError):
        make_holdout_split(ds, normal_class=1, train_fraction=1.0)
