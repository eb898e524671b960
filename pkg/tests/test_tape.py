import numpy as np
import pytest

from tailgen.errors import ContractError, ShapeError
from tailgen.tape import EvalOps, Tape


def finite_difference(fn, arrays, h=1e-5):
    """Central-difference gradients of a scalar fn over a list of arrays."""
    grads = []
    for a in arrays:
        g = np.zeros_like(a)
        it = np.nditer(a, flags=["multi_index"])
        while not it.finished:
            idx = it.multi_index
            orig = a[idx]
            a[idx] = orig + h
            up = fn()
            a[idx] = orig - h
            down = fn()
            a[idx] = orig
            g[idx] = (up - down) / (2 * h)
            it.iternext()
        grads.append(g)
    return grads


def test_square_gradient():
    t = Tape()
    x = t.leaf([[3.0]])
    y = t.mul(x, x)
    g = t.backward(y)
    assert g.wrt(x)[0, 0] == pytest.approx(6.0)


def test_product_plus_term_gradient():
    # f(x, y) = x*y + y at (2, 5) -> df/dx = 5, df/dy = 3
    t = Tape()
    x = t.leaf([[2.0]])
    y = t.leaf([[5.0]])
    f = t.add(t.mul(x, y), y)
    g = t.backward(f)
    assert g.wrt(x)[0, 0] == pytest.approx(5.0)
    assert g.wrt(y)[0, 0] == pytest.approx(3.0)


def test_two_layer_network_matches_finite_differences():
    rng = np.random.default_rng(3)
    x_val = rng.normal(size=(4, 6))
    w1_val = rng.normal(size=(6, 5)) * 0.5
    b1_val = rng.normal(size=(1, 5)) * 0.1
    w2_val = rng.normal(size=(5, 3)) * 0.5
    y = rng.integers(0, 3, size=4)

    def loss_value():
        h = np.maximum(x_val @ w1_val + b1_val, 0.0)
        z = np.tanh(h @ w2_val)
        m = z.max(axis=1, keepdims=True)
        lse = m + np.log(np.exp(z - m).sum(axis=1, keepdims=True))
        return float((lse.ravel() - z[np.arange(4), y]).mean())

    t = Tape()
    x = t.leaf(x_val)
    w1 = t.leaf(w1_val)
    b1 = t.leaf(b1_val)
    w2 = t.leaf(w2_val)
    h = t.relu(t.add(t.matmul(x, w1), b1))
    z = t.tanh(t.matmul(h, w2))
    loss = t.softmax_cross_entropy(z, y)
    assert loss.value[0, 0] == pytest.approx(loss_value(), rel=1e-12)

    g = t.backward(loss)
    numeric = finite_difference(loss_value, [w1_val, b1_val, w2_val])
    for analytic, fd in zip([g.wrt(w1), g.wrt(b1), g.wrt(w2)], numeric):
        denom = np.maximum(np.abs(fd), 1e-8)
        assert (np.abs(analytic - fd) / denom).max() < 1e-4


def test_l1_and_l2_values_and_grads():
    rng = np.random.default_rng(5)
    a_val = rng.normal(size=(3, 4))
    b_val = rng.normal(size=(3, 4))
    w = rng.uniform(0.2, 1.0, size=(3, 1))

    t = Tape()
    a = t.leaf(a_val)
    b = t.leaf(b_val)
    l1 = t.l1(a, b, weights=w)
    l2 = t.l2(a, b)
    assert l1.value[0, 0] == pytest.approx(np.mean(w * np.abs(a_val - b_val)))
    assert l2.value[0, 0] == pytest.approx(np.mean((a_val - b_val) ** 2))

    g1 = t.backward(l1)
    fd = finite_difference(lambda: float(np.mean(w * np.abs(a_val - b_val))), [a_val])[0]
    assert np.abs(g1.wrt(a) - fd).max() < 1e-6

    g2 = t.backward(l2)
    fd2 = finite_difference(lambda: float(np.mean((a_val - b_val) ** 2)), [a_val])[0]
    assert np.abs(g2.wrt(a) - fd2).max() < 1e-6


def test_row_and_scalar_broadcast_gradients():
    rng = np.random.default_rng(9)
    x_val = rng.normal(size=(5, 3))
    bias_val = rng.normal(size=(1, 3))
    scale_val = np.array([[0.7]])

    def value():
        return float(np.mean((scale_val * (x_val + bias_val)) ** 2))

    t = Tape()
    x = t.leaf(x_val)
    bias = t.leaf(bias_val)
    scale = t.leaf(scale_val)
    out = t.l2(t.mul(scale, t.add(x, bias)), t.leaf(np.zeros((5, 3))))
    g = t.backward(out)
    fd = finite_difference(value, [bias_val, scale_val])
    assert np.abs(g.wrt(bias) - fd[0]).max() < 1e-6
    assert np.abs(g.wrt(scale) - fd[1]).max() < 1e-6


def test_unused_leaf_gets_zero_gradient():
    t = Tape()
    x = t.leaf([[2.0]])
    unused = t.leaf([[7.0, 1.0]])
    y = t.mul(x, x)
    g = t.backward(y)
    assert np.array_equal(g.wrt(unused), np.zeros((1, 2)))


def test_backward_rejects_non_scalar():
    t = Tape()
    x = t.leaf([[1.0, 2.0]])
    y = t.add(x, x)
    with pytest.raises(ContractError):
        t.backward(y)


def test_incompatible_shapes_rejected():
    t = Tape()
    a = t.leaf(np.zeros((2, 3)))
    b = t.leaf(np.zeros((3, 2)))
    with pytest.raises(ShapeError):
        t.add(a, b)
    with pytest.raises(ShapeError):
        t.matmul(a, t.leaf(np.zeros((2, 2))))


def test_eval_ops_matches_tape_forward():
    rng = np.random.default_rng(2)
    x = rng.normal(size=(3, 4))
    w = rng.normal(size=(4, 2))

    t = Tape()
    out_tape = t.tanh(t.matmul(t.relu(t.leaf(x)), t.leaf(w)))
    out_eval = EvalOps.tanh(EvalOps.matmul(EvalOps.relu(EvalOps.leaf(x)), EvalOps.leaf(w)))
    assert np.array_equal(out_tape.value, out_eval)
