"""Dataset ingestion, preprocessing, and one-class split construction.

Two on-disk formats are supported: the big-endian IDX container used to
distribute MNIST-style image/label files, and plain numeric CSV with the
label in the last column. Preprocessing helpers cover per-image contrast
normalization and per-feature standardization; split helpers turn a labeled
multiclass dataset (or a single 0/1-labeled set) into the normal-only
training view used by one-class detectors.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "DataFormatError",
    "LabeledDataset",
    "OneClassSplit",
    "load_idx",
    "load_csv",
    "global_contrast_normalization",
    "standardize",
    "make_one_class_split",
    "make_holdout_split",
]

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801


class DataFormatError(ValueError):
    """Raised when an input file does not match its declared format."""


@dataclass
class LabeledDataset:
    """Feature matrix with one small-integer label per row."""

    features: np.ndarray
    labels: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {self.features.shape}")
        if self.labels.shape != (self.features.shape[0],):
            raise ValueError(
                f"labels length {self.labels.shape} does not match "
                f"{self.features.shape[0]} feature rows"
            )


@dataclass
class OneClassSplit:
    """Normal-only training features plus a 0/1-relabeled test set."""

    train_normals: np.ndarray
    test_features: np.ndarray
    test_labels: np.ndarray
    normal_class: int

    def __post_init__(self) -> None:
        self.train_normals = np.asarray(self.train_normals, dtype=np.float64)
        self.test_features = np.asarray(self.test_features, dtype=np.float64)
        self.test_labels = np.asarray(self.test_labels, dtype=np.int64)
        if self.test_labels.shape != (self.test_features.shape[0],):
            raise ValueError("test labels must pair with test feature rows")
        if not np.isin(self.test_labels, (0, 1)).all():
            raise ValueError("test labels must be 0 (normal) or 1 (anomaly)")


def _read_exact(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc


def load_idx(image_path, label_path, name: str = "") -> LabeledDataset:
    """Load a paired IDX image/label file set.

    Images are flattened row-major to one row per image and scaled to [0, 1]
    by dividing by 255; labels are paired by position.
    """
    img_path, lab_path = Path(image_path), Path(label_path)

    img_bytes = _read_exact(img_path)
    if len(img_bytes) < 16:
        raise DataFormatError(f"{img_path}: header truncated")
    magic, count, rows, cols = struct.unpack(">IIII", img_bytes[:16])
    if magic != IDX_IMAGE_MAGIC:
        raise DataFormatError(
            f"{img_path}: bad magic 0x{magic:08x}, expected 0x{IDX_IMAGE_MAGIC:08x}"
        )
    expected = 16 + count * rows * cols
    if len(img_bytes) != expected:
        raise DataFormatError(
            f"{img_path}: payload is {len(img_bytes)} bytes, expected {expected}"
        )
    pixels = np.frombuffer(img_bytes, dtype=np.uint8, offset=16)
    features = pixels.reshape(count, rows * cols).astype(np.float64) / 255.0

    lab_bytes = _read_exact(lab_path)
    if len(lab_bytes) < 8:
        raise DataFormatError(f"{lab_path}: header truncated")
    magic, lab_count = struct.unpack(">II", lab_bytes[:8])
    if magic != IDX_LABEL_MAGIC:
        raise DataFormatError(
            f"{lab_path}: bad magic 0x{magic:08x}, expected 0x{IDX_LABEL_MAGIC:08x}"
        )
    if len(lab_bytes) != 8 + lab_count:
        raise DataFormatError(
            f"{lab_path}: payload is {len(lab_bytes)} bytes, expected {8 + lab_count}"
        )
    if lab_count != count:
        raise DataFormatError(
            f"label count {lab_count} does not match image count {count}"
        )
    labels = np.frombuffer(lab_bytes, dtype=np.uint8, offset=8).astype(np.int64)
    return LabeledDataset(features=features, labels=labels, name=name or img_path.stem)


def _parse_cell(text: str, path: Path, row: int, col: int) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise DataFormatError(
            f"{path}: non-numeric cell {text!r} at row {row}, column {col}"
        ) from exc


def load_csv(path, name: str = "") -> LabeledDataset:
    """Load a numeric CSV whose last column is an integer label.

    A header row is detected by a non-numeric first line and skipped.
    """
    csv_path = Path(path)
    try:
        with open(csv_path, newline="") as handle:
            rows = [row for row in csv.reader(handle) if row]
    except OSError as exc:
        raise DataFormatError(f"cannot read {csv_path}: {exc}") from exc
    if not rows:
        raise DataFormatError(f"{csv_path}: file holds no data rows")

    def numeric_row(cells: list[str]) -> bool:
        try:
            for cell in cells:
                float(cell)
        except ValueError:
            return False
        return True

    if not numeric_row(rows[0]):
        rows = rows[1:]
        if not rows:
            raise DataFormatError(f"{csv_path}: only a header row present")

    width = len(rows[0])
    if width < 2:
        raise DataFormatError(f"{csv_path}: rows need at least one feature and a label")
    values = np.empty((len(rows), width), dtype=np.float64)
    for r, cells in enumerate(rows):
        if len(cells) != width:
            raise DataFormatError(
                f"{csv_path}: ragged row {r} has {len(cells)} cells, expected {width}"
            )
        for c, cell in enumerate(cells):
            values[r, c] = _parse_cell(cell, csv_path, r, c)

    label_col = values[:, -1]
    if not np.all(label_col == np.round(label_col)):
        raise DataFormatError(f"{csv_path}: last column must hold integer labels")
    return LabeledDataset(
        features=values[:, :-1],
        labels=label_col.astype(np.int64),
        name=name or csv_path.stem,
    )


def global_contrast_normalization(x_batch, eps: float = 1e-8) -> np.ndarray:
    """Center each row and scale it to unit root-mean-square.

    Constant rows map to all zeros thanks to the eps floor on the RMS.
    """
    x_arr = np.asarray(x_batch, dtype=np.float64)
    if x_arr.ndim != 2 or x_arr.shape[1] < 2:
        raise ValueError("x_batch must be 2-D with at least two columns per row")
    centered = x_arr - x_arr.mean(axis=1, keepdims=True)
    rms = np.sqrt(np.mean(np.square(centered), axis=1, keepdims=True))
    return centered / np.maximum(rms, eps)


def standardize(
    train_features, other_features
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Z-score both sets using the training set's per-feature statistics.

    Returns ``(train_scaled, other_scaled, mean, std)``; the std is floored
    at 1e-8 so constant features scale to zero instead of exploding.
    """
    train = np.asarray(train_features, dtype=np.float64)
    other = np.asarray(other_features, dtype=np.float64)
    if train.ndim != 2 or train.shape[0] == 0:
        raise ValueError("train_features must be a non-empty 2-D array")
    if other.ndim != 2 or other.shape[1] != train.shape[1]:
        raise ValueError("other_features must be 2-D with the same feature count")
    mean = train.mean(axis=0)
    std = np.maximum(train.std(axis=0), 1e-8)
    return (train - mean) / std, (other - mean) / std, mean, std


def make_one_class_split(
    dataset_train: LabeledDataset, dataset_test: LabeledDataset, normal_class: int
) -> OneClassSplit:
    """One-class view of an existing train/test partition.

    Training keeps only the normal class; the test partition is kept whole
    with labels mapped to 0 (normal class) / 1 (everything else).
    """
    normal_class = int(normal_class)
    train_mask = dataset_train.labels == normal_class
    if not train_mask.any():
        raise ValueError(
            f"class {normal_class} does not occur in the training labels"
        )
    return OneClassSplit(
        train_normals=dataset_train.features[train_mask],
        test_features=dataset_test.features,
        test_labels=(dataset_test.labels != normal_class).astype(np.int64),
        normal_class=normal_class,
    )


def make_holdout_split(
    dataset: LabeledDataset,
    normal_class: int,
    train_fraction: float = 0.8,
    seed: int = 0,
) -> OneClassSplit:
    """One-class split for datasets that ship as a single labeled file.

    A seeded permutation sends ``train_fraction`` of the normal rows to
    training; the remaining normals plus every non-normal row form the test
    set, relabeled 0/1.
    """
    if not (0.0 < train_fraction < 1.0):
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    normal_class = int(normal_class)
    normal_idx = np.nonzero(dataset.labels == normal_class)[0]
    anomaly_idx = np.nonzero(dataset.labels != normal_class)[0]
    if len(normal_idx) == 0:
        raise ValueError(f"class {normal_class} does not occur in the labels")

    order = np.random.default_rng(seed).permutation(len(normal_idx))
    n_train = int(round(train_fraction * len(normal_idx)))
    n_train = min(max(n_train, 1), len(normal_idx) - 1)
    train_rows = normal_idx[order[:n_train]]
    heldout_rows = normal_idx[order[n_train:]]

    test_rows = np.concatenate([heldout_rows, anomaly_idx])
    test_labels = np.concatenate(
        [np.zeros(len(heldout_rows), dtype=np.int64), np.ones(len(anomaly_idx), dtype=np.int64)]
    )
    return OneClassSplit(
        train_normals=dataset.features[train_rows],
        test_features=dataset.features[test_rows],
        test_labels=test_labels,
        normal_class=normal_class,
    )
