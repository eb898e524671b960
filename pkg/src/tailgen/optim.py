"""Adaptive moment optimizers over named parameter dictionaries."""

from __future__ import annotations

import numpy as np


class Adam:
    """Adam with optional decoupled weight decay (the AdamW variant).

    Parameters are updated in place; gradients are supplied per step as a
    dict sharing the parameter keys. Missing keys are treated as zero
    gradient. The update loop works in per-parameter scratch buffers, so
    steady-state steps allocate nothing.
    """

    def __init__(self, params: dict[str, np.ndarray], lr: float,
                 betas: tuple[float, float] = (0.9, 0.999), eps: float = 1e-8,
                 weight_decay: float = 0.0, decoupled: bool = False):
        self.params = params
        self.lr = float(lr)
        self.beta1, self.beta2 = betas
        self.eps = float(eps)
        self.weight_decay = float(weight_decay)
        self.decoupled = decoupled
        self.t = 0
        self._m = {k: np.zeros_like(v) for k, v in params.items()}
        self._v = {k: np.zeros_like(v) for k, v in params.items()}
        self._s = {k: np.zeros_like(v) for k, v in params.items()}
        self._g = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        inv_sqrt_bc2 = 1.0 / np.sqrt(1.0 - self.beta2 ** self.t)
        step_scale = self.lr / bc1
        for k, p in self.params.items():
            m, v, s = self._m[k], self._v[k], self._s[k]
            g = grads.get(k)
            if g is None:
                g = self._g[k]
                g.fill(0.0)
            if self.weight_decay and not self.decoupled:
                buf = self._g[k]
                if g is buf:  # zero-gradient path: effective grad is just the decay
                    np.multiply(p, self.weight_decay, out=buf)
                else:
                    np.multiply(p, self.weight_decay, out=buf)
                    buf += g
                g = buf

            m *= self.beta1
            np.multiply(g, 1.0 - self.beta1, out=s)
            m += s
            v *= self.beta2
            np.multiply(g, g, out=s)
            s *= 1.0 - self.beta2
            v += s

            np.sqrt(v, out=s)
            s *= inv_sqrt_bc2
            s += self.eps
            np.divide(m, s, out=s)
            s *= step_scale
            if self.weight_decay and self.decoupled:
                p *= 1.0 - self.lr * self.weight_decay
            p -= s


def adamw(params: dict[str, np.ndarray], lr: float, weight_decay: float = 1e-4) -> Adam:
    """Adam with decoupled weight decay."""
    return Adam(params, lr, weight_decay=weight_decay, decoupled=True)
