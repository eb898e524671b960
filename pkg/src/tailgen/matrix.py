"""Dense row-major float64 matrix with validated construction.

`Matrix` is the boundary type for the linear-algebra routines; the hot
training paths work on the underlying numpy arrays directly. Entries are
checked finite at construction so downstream code never has to re-guard.
"""

from __future__ import annotations

from typing import Iterable, Sequence, Union

import numpy as np

from .errors import ShapeError

ArrayLike = Union["Matrix", np.ndarray, Sequence[Sequence[float]]]


class Matrix:
    """Immutable 2-D float64 matrix."""

    __slots__ = ("_a",)

    def __init__(self, data: Iterable, rows: int | None = None, cols: int | None = None):
        if rows is not None or cols is not None:
            # flat row-major payload plus explicit dimensions
            flat = np.asarray(list(data) if not isinstance(data, np.ndarray) else data,
                              dtype=np.float64).ravel()
            if rows is None or cols is None or rows < 0 or cols < 0:
                raise ShapeError("both rows and cols are required and must be non-negative")
            if flat.size != rows * cols:
                raise ShapeError(f"data length {flat.size} != rows*cols {rows * cols}")
            a = flat.reshape(rows, cols)
        else:
            a = np.asarray(data, dtype=np.float64)
            if a.ndim != 2:
                raise ShapeError(f"expected a 2-D array, got ndim={a.ndim}")
        if a.size and not np.all(np.isfinite(a)):
            raise ShapeError("matrix entries must be finite")
        a = np.ascontiguousarray(a)
        a.setflags(write=False)
        self._a = a

    @classmethod
    def from_array(cls, a: np.ndarray) -> "Matrix":
        return cls(a)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(np.zeros((rows, cols)))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(np.eye(n))

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def data(self) -> np.ndarray:
        """Flat row-major view of the entries (read-only)."""
        return self._a.reshape(-1)

    def to_array(self) -> np.ndarray:
        """Read-only 2-D view of the entries."""
        return self._a

    def transpose(self) -> "Matrix":
        return Matrix(self._a.T)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return matmul(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._a, other._a))

    def __hash__(self) -> int:  # immutable, so hash by content
        return hash((self.shape, self._a.tobytes()))

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols})"


def _as_array(x: ArrayLike) -> np.ndarray:
    if isinstance(x, Matrix):
        return x.to_array()
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2-D operand, got ndim={a.ndim}")
    return a


def matmul(a: ArrayLike, b: ArrayLike) -> Matrix:
    """Matrix product a @ b with explicit inner-dimension validation."""
    aa, bb = _as_array(a), _as_array(b)
    if aa.shape[1] != bb.shape[0]:
        raise ShapeError(f"inner dimensions differ: {aa.shape} @ {bb.shape}")
    return Matrix(aa @ bb)
