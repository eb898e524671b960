"""Define-by-run reverse-mode differentiation for small dense networks.

A `Tape` records primitive operations as they execute on float64 matrices
and replays them backwards to accumulate adjoints. The primitive set is
deliberately minimal: add, mul, matmul, relu, tanh, softmax cross-entropy,
L1 and L2 means. Elementwise ops broadcast only against a scalar (1,1), a
row (1,c) or a column (r,1); anything richer is a shape error by design.

Values are always 2-D; scalars are (1,1) matrices. A tape is single-writer
and should be confined to one training step or episode.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ContractError, ShapeError


@dataclass(frozen=True)
class Var:
    """Handle to one node on a tape."""

    tape: "Tape"
    idx: int

    @property
    def value(self) -> np.ndarray:
        return self.tape.values[self.idx]

    @property
    def shape(self) -> tuple[int, int]:
        return self.tape.values[self.idx].shape


def _compatible(sa: tuple[int, int], sb: tuple[int, int]) -> bool:
    if sa == sb:
        return True
    for s, o in ((sa, sb), (sb, sa)):
        if s == (1, 1):
            return True
        if s[0] == 1 and s[1] == o[1]:  # row against full
            return True
        if s[1] == 1 and s[0] == o[0]:  # column against full
            return True
    return False


def _unbroadcast(grad: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Sum an adjoint back down to the shape of a broadcast operand."""
    if grad.shape == shape:
        return grad
    out = grad
    if shape[0] == 1 and out.shape[0] != 1:
        out = out.sum(axis=0, keepdims=True)
    if shape[1] == 1 and out.shape[1] != 1:
        out = out.sum(axis=1, keepdims=True)
    return out


def _as_value(x) -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        a = a.reshape(1, -1)
    elif a.ndim != 2:
        raise ShapeError(f"tape values must be scalars, vectors or matrices, got ndim={a.ndim}")
    return a


class Gradients:
    """Adjoints produced by one backward pass."""

    def __init__(self, tape: "Tape", adjoints: list[Optional[np.ndarray]]):
        self._tape = tape
        self._adj = adjoints

    def wrt(self, var: Var) -> np.ndarray:
        """d(output)/d(var); zero if var does not influence the output."""
        g = self._adj[var.idx]
        if g is None:
            return np.zeros_like(self._tape.values[var.idx])
        return g

    def leaves(self) -> dict[int, np.ndarray]:
        """Gradient map over every leaf node, keyed by node id."""
        out = {}
        for i, (op, _, _) in enumerate(self._tape.nodes):
            if op == "leaf":
                g = self._adj[i]
                out[i] = np.zeros_like(self._tape.values[i]) if g is None else g
        return out


class Tape:
    def __init__(self):
        self.nodes: list[tuple[str, tuple[int, ...], object]] = []
        self.values: list[np.ndarray] = []

    def _push(self, op: str, inputs: tuple[int, ...], value: np.ndarray, aux=None) -> Var:
        self.nodes.append((op, inputs, aux))
        self.values.append(value)
        return Var(self, len(self.values) - 1)

    def leaf(self, value, copy: bool = True) -> Var:
        """Record an input or parameter; gradients accumulate here.

        With copy=False the caller promises not to mutate the array while
        the tape is alive (used on hot paths to avoid churning memory).
        """
        v = _as_value(value)
        return self._push("leaf", (), v.copy() if copy else v)

    # -- elementwise -------------------------------------------------------

    def _binary(self, op: str, a: Var, b: Var) -> tuple[np.ndarray, np.ndarray]:
        va, vb = self.values[a.idx], self.values[b.idx]
        if not _compatible(va.shape, vb.shape):
            raise ShapeError(f"{op}: incompatible shapes {va.shape} and {vb.shape}")
        return va, vb

    def add(self, a: Var, b: Var) -> Var:
        va, vb = self._binary("add", a, b)
        return self._push("add", (a.idx, b.idx), va + vb)

    def mul(self, a: Var, b: Var) -> Var:
        va, vb = self._binary("mul", a, b)
        return self._push("mul", (a.idx, b.idx), va * vb)

    def matmul(self, a: Var, b: Var) -> Var:
        va, vb = self.values[a.idx], self.values[b.idx]
        if va.shape[1] != vb.shape[0]:
            raise ShapeError(f"matmul: inner dimensions differ: {va.shape} @ {vb.shape}")
        return self._push("matmul", (a.idx, b.idx), va @ vb)

    def relu(self, x: Var) -> Var:
        v = self.values[x.idx]
        return self._push("relu", (x.idx,), np.maximum(v, 0.0))

    def tanh(self, x: Var) -> Var:
        v = np.tanh(self.values[x.idx])
        return self._push("tanh", (x.idx,), v, aux=v)

    # -- reductions --------------------------------------------------------

    def softmax_cross_entropy(self, logits: Var, labels: np.ndarray) -> Var:
        """Mean cross-entropy of row-wise softmax against integer labels."""
        z = self.values[logits.idx]
        y = np.asarray(labels, dtype=np.int64).ravel()
        if y.shape[0] != z.shape[0]:
            raise ShapeError(f"labels length {y.shape[0]} != batch {z.shape[0]}")
        if y.size and (y.min() < 0 or y.max() >= z.shape[1]):
            raise ContractError("label index out of range")
        m = z.max(axis=1, keepdims=True)
        logsumexp = m + np.log(np.exp(z - m).sum(axis=1, keepdims=True))
        ce = logsumexp.ravel() - z[np.arange(z.shape[0]), y]
        probs = np.exp(z - logsumexp)
        value = np.array([[ce.mean()]])
        return self._push("softmax_ce", (logits.idx,), value, aux=(probs, y))

    def l1(self, a: Var, b: Var, weights: np.ndarray | None = None) -> Var:
        """Mean absolute difference, optionally weighted by a constant array."""
        va, vb = self._binary("l1", a, b)
        diff = va - vb
        w = None
        if weights is not None:
            w = np.broadcast_to(np.asarray(weights, dtype=np.float64), diff.shape)
        term = np.abs(diff) if w is None else w * np.abs(diff)
        value = np.array([[term.mean()]])
        return self._push("l1", (a.idx, b.idx), value, aux=(np.sign(diff), w))

    def l2(self, a: Var, b: Var) -> Var:
        """Mean squared difference."""
        va, vb = self._binary("l2", a, b)
        diff = va - vb
        value = np.array([[np.mean(diff * diff)]])
        return self._push("l2", (a.idx, b.idx), value, aux=diff)

    # -- reverse pass ------------------------------------------------------

    def backward(self, output: Var) -> Gradients:
        """Reverse-accumulate d(output)/d(node) for every node on the tape."""
        if output.tape is not self:
            raise ContractError("output belongs to a different tape")
        if self.values[output.idx].shape != (1, 1):
            raise ContractError(f"backward requires a scalar output, got shape {output.shape}")

        adj: list[Optional[np.ndarray]] = [None] * len(self.nodes)
        adj[output.idx] = np.ones((1, 1))

        def accumulate(idx: int, g: np.ndarray, fresh: bool = True) -> None:
            # fresh means g is a newly allocated array this pass may own
            if adj[idx] is None:
                adj[idx] = g if fresh else g.copy()
            else:
                adj[idx] = adj[idx] + g

        for i in range(output.idx, -1, -1):
            g = adj[i]
            if g is None:
                continue
            op, inputs, aux = self.nodes[i]
            if op == "leaf":
                continue
            if op == "add":
                a, b = inputs
                ga = _unbroadcast(g, self.values[a].shape)
                gb = _unbroadcast(g, self.values[b].shape)
                accumulate(a, ga, fresh=ga is not g)
                accumulate(b, gb, fresh=gb is not g)
            elif op == "mul":
                a, b = inputs
                accumulate(a, _unbroadcast(g * self.values[b], self.values[a].shape))
                accumulate(b, _unbroadcast(g * self.values[a], self.values[b].shape))
            elif op == "matmul":
                a, b = inputs
                accumulate(a, g @ self.values[b].T)
                accumulate(b, self.values[a].T @ g)
            elif op == "relu":
                (a,) = inputs
                accumulate(a, g * (self.values[a] > 0.0))
            elif op == "tanh":
                (a,) = inputs
                accumulate(a, g * (1.0 - aux * aux))
            elif op == "softmax_ce":
                (a,) = inputs
                probs, y = aux
                grad = probs.copy()
                grad[np.arange(grad.shape[0]), y] -= 1.0
                accumulate(a, g[0, 0] * grad / grad.shape[0])
            elif op == "l1":
                a, b = inputs
                sign, w = aux
                base = sign if w is None else w * sign
                scaled = g[0, 0] * base / base.size
                accumulate(a, _unbroadcast(scaled, self.values[a].shape))
                accumulate(b, _unbroadcast(-scaled, self.values[b].shape))
            elif op == "l2":
                a, b = inputs
                diff = aux
                scaled = g[0, 0] * 2.0 * diff / diff.size
                accumulate(a, _unbroadcast(scaled, self.values[a].shape))
                accumulate(b, _unbroadcast(-scaled, self.values[b].shape))
            else:  # pragma: no cover
                raise ContractError(f"unknown op {op!r}")
        return Gradients(self, adj)


class EvalOps:
    """Tape-shaped interface that just computes, for inference paths.

    Forward code written against a `Tape` can run gradient-free by passing
    an `EvalOps` instead; values are plain arrays rather than `Var`s.
    """

    @staticmethod
    def leaf(value):
        return _as_value(value)

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def matmul(a, b):
        return a @ b

    @staticmethod
    def relu(x):
        return np.maximum(x, 0.0)

    @staticmethod
    def tanh(x):
        return np.tanh(x)

    @staticmethod
    def softmax_cross_entropy(logits, labels):
        y = np.asarray(labels, dtype=np.int64).ravel()
        m = logits.max(axis=1, keepdims=True)
        lse = m + np.log(np.exp(logits - m).sum(axis=1, keepdims=True))
        ce = lse.ravel() - logits[np.arange(logits.shape[0]), y]
        return np.array([[ce.mean()]])

    @staticmethod
    def l1(a, b, weights=None):
        term = np.abs(a - b)
        if weights is not None:
            term = np.broadcast_to(np.asarray(weights, dtype=np.float64), term.shape) * term
        return np.array([[term.mean()]])

    @staticmethod
    def l2(a, b):
        d = a - b
        return np.array([[np.mean(d * d)]])
