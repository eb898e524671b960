import numpy as np
import pytest

from tailgen.dataset_io import load_dataset, save_dataset
from tailgen.errors import CorruptionError, FormatError
from tailgen.profiles import LongTailProfile
from tailgen.shapes import ShapeDataset, generate_dataset


@pytest.fixture
def small_dataset():
    return generate_dataset(LongTailProfile(3, 20, 2.5), seed=4)


def test_round_trip_exact(tmp_path, small_dataset):
    path = tmp_path / "ds.ltg"
    save_dataset(small_dataset, path)
    loaded = load_dataset(path)
    assert loaded.num_classes == small_dataset.num_classes
    assert loaded.side == small_dataset.side
    assert loaded.class_counts == small_dataset.class_counts
    assert np.array_equal(loaded.pixels, small_dataset.pixels)
    assert np.array_equal(loaded.labels, small_dataset.labels)
    assert np.array_equal(loaded.sketches, small_dataset.sketches)
    assert np.array_equal(loaded.splits, small_dataset.splits)


def test_save_is_byte_deterministic(tmp_path, small_dataset):
    p1, p2 = tmp_path / "a.ltg", tmp_path / "b.ltg"
    save_dataset(small_dataset, p1)
    save_dataset(small_dataset, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_bad_magic_rejected(tmp_path, small_dataset):
    path = tmp_path / "ds.ltg"
    save_dataset(small_dataset, path)
    raw = bytearray(path.read_bytes())
    raw[:4] = b"NOPE"
    path.write_bytes(bytes(raw))
    with pytest.raises(FormatError):
        load_dataset(path)


def test_truncation_detected(tmp_path, small_dataset):
    path = tmp_path / "ds.ltg"
    save_dataset(small_dataset, path)
    raw = path.read_bytes()
    path.write_bytes(raw[:-1])
    with pytest.raises(CorruptionError):
        load_dataset(path)


def test_trailing_garbage_detected(tmp_path, small_dataset):
    path = tmp_path / "ds.ltg"
    save_dataset(small_dataset, path)
    path.write_bytes(path.read_bytes() + b"\x00")
    with pytest.raises(CorruptionError):
        load_dataset(path)


def test_zero_count_class_loads(tmp_path):
    # hand-built dataset where class 1 is empty
    ds = ShapeDataset(
        side=16, num_classes=3, class_counts=[2, 0, 1],
        pixels=np.zeros((3, 16, 16)),
        labels=np.array([0, 0, 2], dtype=np.int64),
        sketches=np.zeros((3, 16, 16), dtype=np.uint8),
        splits=np.array([0, 1, 2], dtype=np.uint8),
    )
    path = tmp_path / "ds.ltg"
    save_dataset(ds, path)
    loaded = load_dataset(path)
    assert loaded.class_counts == [2, 0, 1]
    assert len(loaded.indices(label=1)) == 0
