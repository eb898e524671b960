import numpy as np

from tailgen.rng import RngStream


def test_same_address_same_draws():
    a = RngStream(42, stream=3).normal((4, 4))
    b = RngStream(42, stream=3).normal((4, 4))
    assert np.array_equal(a, b)


def test_different_streams_differ():
    a = RngStream(42, stream=0).normal(100)
    b = RngStream(42, stream=1).normal(100)
    assert not np.array_equal(a, b)


def test_derive_is_order_independent():
    root = RngStream(7)
    first = root.derive(2, 5).uniform(shape=8)
    # consuming draws from an unrelated stream must not disturb the child
    other = root.derive(9)
    other.normal(1000)
    second = RngStream(7).derive(2, 5).uniform(shape=8)
    assert np.array_equal(first, second)


def test_derive_distinct_keys_independent():
    root = RngStream(1)
    xs = root.derive(0).normal(50)
    ys = root.derive(1).normal(50)
    assert not np.array_equal(xs, ys)


def test_integers_half_open():
    draws = RngStream(5).integers(0, 3, shape=1000)
    assert draws.min() == 0
    assert draws.max() == 2
