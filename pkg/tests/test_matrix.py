import numpy as np
import pytest

from tailgen.errors import ShapeError
from tailgen.matrix import Matrix, matmul


def test_identity_times_matrix():
    a = Matrix([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]])
    out = matmul(Matrix.identity(3), a)
    assert out == a


def test_hand_checked_2x2():
    a = Matrix([[1.0, 2.0], [3.0, 4.0]])
    b = Matrix([[0.0], [1.0]])
    out = matmul(a, b)
    assert np.allclose(out.to_array(), [[2.0], [4.0]])


def test_matmul_matches_triple_loop_oracle():
    rng = np.random.default_rng(11)
    a = rng.normal(size=(5, 7))
    b = rng.normal(size=(7, 3))
    expected = np.zeros((5, 3))
    for i in range(5):
        for j in range(3):
            acc = 0.0
            for k in range(7):
                acc += a[i, k] * b[k, j]
            expected[i, j] = acc
    out = matmul(Matrix(a), Matrix(b))
    assert np.abs(out.to_array() - expected).max() < 1e-12


def test_dimension_mismatch_raises():
    with pytest.raises(ShapeError):
        matmul(Matrix.zeros(2, 3), Matrix.zeros(2, 3))


def test_flat_constructor_checks_length():
    m = Matrix([1.0, 2.0, 3.0, 4.0, 5.0, 6.0], rows=2, cols=3)
    assert m.shape == (2, 3)
    assert m.data[4] == 5.0
    with pytest.raises(ShapeError):
        Matrix([1.0, 2.0, 3.0], rows=2, cols=2)


def test_non_finite_entries_rejected():
    with pytest.raises(ShapeError):
        Matrix([[1.0, np.nan]])
    with pytest.raises(ShapeError):
        Matrix([[np.inf, 0.0]])


def test_matrix_is_immutable():
    m = Matrix([[1.0, 2.0]])
    with pytest.raises(ValueError):
        m.to_array()[0, 0] = 5.0
