"""Conditional noise predictor with a sketch decoding branch.

The trunk is two residual fully-connected blocks over the flattened
image, with learned time and class embeddings added to the input
projection. Two trunk taps feed a linear sketch decoder whose logits are
squashed into [0, 1]; the noise head reads the last tap. The forward pass
is written against the generic op interface, so the same code runs on a
Tape for training and on EvalOps for sampling.

Model space is [-1, 1]: pixel images are rescaled on the way in and
clipped back to [0, 1] on the way out.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import RngStream
from .schedule import NoiseSchedule, forward_diffuse
from .tape import EvalOps, Tape

DEFAULT_EMBED_DIM = 32
DEFAULT_WIDTHS = (128, 128)


def to_model_space(pixels: np.ndarray) -> np.ndarray:
    return 2.0 * pixels - 1.0


def to_pixel_space(z: np.ndarray) -> np.ndarray:
    return np.clip((z + 1.0) * 0.5, 0.0, 1.0)


@dataclass
class DenoiserModel:
    steps: int
    num_classes: int
    image_dim: int
    embed_dim: int
    widths: tuple[int, int]
    params: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def init(cls, steps: int, num_classes: int, image_dim: int = 256,
             embed_dim: int = DEFAULT_EMBED_DIM, widths: tuple[int, int] = DEFAULT_WIDTHS,
             rng: RngStream | None = None) -> "DenoiserModel":
        rng = rng or RngStream(0)
        h1, h2 = widths
        d = image_dim

        def w(rows, cols):
            return rng.normal((rows, cols), scale=1.0 / np.sqrt(rows))

        # zero-init output heads: the first predictions are exactly zero, so
        # the initial objective sits at the noise variance instead of an
        # arbitrary init-scale artifact
        params = {
            "t_embed": rng.normal((steps, embed_dim), scale=0.5),
            "c_embed": rng.normal((num_classes, embed_dim), scale=0.5),
            "w_in": w(d, h1), "b_in": np.zeros((1, h1)),
            "w_cond": w(embed_dim, h1),
            "w1": w(h1, h1), "b1": np.zeros((1, h1)),
            "w2": w(h2, h2), "b2": np.zeros((1, h2)),
            "w_eps": np.zeros((h2, d)), "b_eps": np.zeros((1, d)),
            "w_sk1": np.zeros((h1, d)), "w_sk2": np.zeros((h2, d)), "b_sk": np.zeros((1, d)),
        }
        if h1 != h2:
            params["w_mid"] = w(h1, h2)
            params["b_mid"] = np.zeros((1, h2))
        return cls(steps, num_classes, d, embed_dim, widths, params)

    def one_hot_t(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=np.int64))
        out = np.zeros((t.size, self.steps))
        out[np.arange(t.size), t - 1] = 1.0
        return out

    def one_hot_c(self, c) -> np.ndarray:
        c = np.atleast_1d(np.asarray(c, dtype=np.int64))
        out = np.zeros((c.size, self.num_classes))
        out[np.arange(c.size), c] = 1.0
        return out

    def forward(self, ops, p: dict, z, t, c):
        """(eps_hat, sketch_pred, taps) for a batch in model space.

        `p` maps parameter names to ops-compatible handles (tape leaves or
        raw arrays); z/t/c likewise come pre-wrapped by the caller.
        """
        emb = ops.add(ops.matmul(t, p["t_embed"]), ops.matmul(c, p["c_embed"]))
        u0 = ops.add(ops.add(ops.matmul(z, p["w_in"]), p["b_in"]),
                     ops.matmul(emb, p["w_cond"]))
        h1 = ops.add(ops.relu(ops.add(ops.matmul(u0, p["w1"]), p["b1"])), u0)
        mid = h1
        if "w_mid" in p:
            mid = ops.add(ops.matmul(h1, p["w_mid"]), p["b_mid"])
        h2 = ops.add(ops.relu(ops.add(ops.matmul(mid, p["w2"]), p["b2"])), mid)
        eps_hat = ops.add(ops.matmul(h2, p["w_eps"]), p["b_eps"])
        logits = ops.add(ops.add(ops.matmul(h1, p["w_sk1"]), ops.matmul(h2, p["w_sk2"])),
                         p["b_sk"])
        half = ops.leaf(np.array([[0.5]]))
        sketch = ops.add(ops.mul(ops.tanh(logits), half), half)
        return eps_hat, sketch, (h1, h2)

    def predict(self, z: np.ndarray, t, c) -> tuple[np.ndarray, np.ndarray]:
        """Gradient-free forward pass on raw arrays."""
        t_oh = self.one_hot_t(t)
        c_oh = self.one_hot_c(c)
        eps_hat, sketch, _ = self.forward(EvalOps, self.params, np.asarray(z, dtype=np.float64),
                                          t_oh, c_oh)
        return eps_hat, sketch

    def taped_forward(self, tape: Tape, z: np.ndarray, t, c):
        """Forward pass recording gradients; returns (eps_hat, sketch, param vars).

        Parameter arrays are recorded without copying; the optimizer must
        only mutate them after the tape's backward pass.
        """
        p = {k: tape.leaf(v, copy=False) for k, v in self.params.items()}
        eps_hat, sketch, _ = self.forward(tape, p, tape.leaf(z, copy=False),
                                          tape.leaf(self.one_hot_t(t), copy=False),
                                          tape.leaf(self.one_hot_c(c), copy=False))
        return eps_hat, sketch, p

    def sketch_head_keys(self) -> tuple[str, ...]:
        return ("w_sk1", "w_sk2", "b_sk")


# -- losses ----------------------------------------------------------------

def ldm_loss(model: DenoiserModel, z0: np.ndarray, t, eps: np.ndarray, c,
             schedule: NoiseSchedule) -> float:
    """Mean squared error between injected and predicted noise."""
    z_t = forward_diffuse(z0, t, eps, schedule)
    eps_hat, _ = model.predict(z_t, t, c)
    return float(EvalOps.l2(eps_hat, np.asarray(eps, dtype=np.float64))[0, 0])


def sketch_scale(schedule: NoiseSchedule, t) -> np.ndarray:
    """sqrt(alpha_bar_t): down-weights supervision at noisier steps."""
    return schedule.sqrt_alpha_bar(t)


def sketch_loss(s_pred: np.ndarray, s_gt: np.ndarray, t, schedule: NoiseSchedule) -> float:
    """sqrt(alpha_bar_t)-scaled mean absolute sketch error.

    With batched inputs each row is scaled by its own step factor before
    the mean, matching a per-sample loss averaged over the batch.
    """
    s_pred = np.atleast_2d(np.asarray(s_pred, dtype=np.float64))
    s_gt = np.atleast_2d(np.asarray(s_gt, dtype=np.float64))
    w = np.asarray(sketch_scale(schedule, t), dtype=np.float64).reshape(-1, 1)
    return float(EvalOps.l1(s_pred, s_gt, weights=w)[0, 0])


def total_loss(model: DenoiserModel, z0: np.ndarray, t, eps: np.ndarray, c,
               s_gt: np.ndarray, schedule: NoiseSchedule, lam: float) -> float:
    """ldm_loss + lam * sketch_loss on one batch."""
    z_t = forward_diffuse(z0, t, eps, schedule)
    eps_hat, s_pred = model.predict(z_t, t, c)
    ldm = float(EvalOps.l2(eps_hat, np.asarray(eps, dtype=np.float64))[0, 0])
    if lam == 0.0:
        return ldm
    return ldm + lam * sketch_loss(s_pred, s_gt, t, schedule)
