import numpy as np
import pytest

from tailgen.errors import ConfigError
from tailgen.profiles import LongTailProfile
from tailgen.shapes import TRAIN, generate_dataset
from tailgen.sketch import extract_sketch


def test_paper_ratio_tail_count():
    # head 1000 at ratio 47.98 puts round(1000/47.98) = 21 samples in the tail
    prof = LongTailProfile(8, 1000, 47.98)
    counts = prof.class_counts()
    assert counts[0] == 1000
    assert counts[-1] == 21
    assert all(a >= b for a, b in zip(counts, counts[1:]))


def test_balanced_two_class_profile():
    prof = LongTailProfile(2, 10, 1.0)
    assert prof.class_counts() == [10, 10]


def test_unsplittable_tail_rejected():
    with pytest.raises(ConfigError):
        LongTailProfile(8, 100, 47.98)  # tail would round to 2


def test_split_sizes_sum_and_floor():
    prof = LongTailProfile(2, 10, 1.0)
    tr, va, te = prof.split_counts(4)
    assert (tr, va, te) == (2, 1, 1)
    tr, va, te = prof.split_counts(100)
    assert (tr, va, te) == (70, 10, 20)


def test_generation_is_deterministic():
    prof = LongTailProfile(3, 30, 3.0)
    a = generate_dataset(prof, seed=5)
    b = generate_dataset(prof, seed=5)
    assert np.array_equal(a.pixels, b.pixels)
    assert np.array_equal(a.sketches, b.sketches)
    assert np.array_equal(a.splits, b.splits)
    c = generate_dataset(prof, seed=6)
    assert not np.array_equal(a.pixels, c.pixels)


def test_class_counts_and_pixel_range():
    prof = LongTailProfile(8, 200, 47.98)
    ds = generate_dataset(prof, seed=11)
    for c, n in enumerate(prof.class_counts()):
        assert len(ds.indices(label=c)) == n
    assert ds.pixels.min() >= 0.0 and ds.pixels.max() <= 1.0
    # quantized to the 8-bit grid
    assert np.allclose(ds.pixels * 255.0, np.round(ds.pixels * 255.0), atol=1e-9)


def test_empirical_imbalance_close_to_ratio():
    prof = LongTailProfile(8, 1000, 47.98)
    counts = prof.class_counts()
    emp = max(counts) / min(counts)
    assert abs(emp - 47.98) / 47.98 < 0.05


def test_sketch_consistency_invariant():
    prof = LongTailProfile(3, 24, 2.0)
    ds = generate_dataset(prof, seed=3)
    for i in range(len(ds)):
        assert np.array_equal(ds.sketches[i], extract_sketch(ds.pixels[i]))


def test_nearest_centroid_separability_oracle():
    # clean renders must be learnable by a plain nearest-centroid rule
    prof = LongTailProfile(8, 70, 1.0)
    overall = []
    for seed in (123, 42):
        ds = generate_dataset(prof, seed=seed, noise_sigma=0.0)
        cents = np.stack([ds.flat_pixels(ds.indices(split=TRAIN, label=c)).mean(axis=0)
                          for c in range(8)])
        X = ds.flat_pixels(np.arange(len(ds)))
        pred = ((X[:, None, :] - cents[None, :, :]) ** 2).sum(axis=2).argmin(axis=1)
        acc = float((pred == ds.labels).mean())
        per_class = [float((pred[ds.labels == c] == c).mean()) for c in range(8)]
        overall.append(acc)
        assert min(per_class) >= 0.85
    assert all(a >= 0.95 for a in overall)


def test_split_proportions_per_class():
    prof = LongTailProfile(4, 120, 4.0)
    ds = generate_dataset(prof, seed=9)
    for c, n in enumerate(prof.class_counts()):
        tr, va, te = prof.split_counts(n)
        assert len(ds.indices(split=0, label=c)) == tr
        assert len(ds.indices(split=1, label=c)) == va
        assert len(ds.indices(split=2, label=c)) == te
