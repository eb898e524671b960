"""Synthesizer training loop."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .denoiser import DenoiserModel, to_model_space
from .errors import ContractError, NumericError
from .optim import adamw
from .rng import RngStream
from .schedule import NoiseSchedule, build_schedule, forward_diffuse
from .shapes import ShapeDataset, TRAIN
from .tape import Tape


@dataclass(frozen=True)
class SynthTrainConfig:
    steps: int = 200
    beta_min: float = 1e-4
    beta_max: float = 0.02
    embed_dim: int = 32
    width1: int = 128
    width2: int = 128
    lambda_sketch: float = 0.1
    lr: float = 1e-4
    weight_decay: float = 1e-4
    epochs: int = 40
    batch_size: int = 16


def batch_loss(model: DenoiserModel, schedule: NoiseSchedule, z0: np.ndarray,
               t: np.ndarray, eps: np.ndarray, c: np.ndarray, s_gt: np.ndarray,
               lam: float):
    """Build the combined objective on a fresh tape.

    Returns (tape, total, ldm, sketch, param vars). The sketch term is
    always wired through the graph scaled by lam, so a zero lam yields
    exactly zero gradients on the sketch head.
    """
    tape = Tape()
    z_t = forward_diffuse(z0, t, eps, schedule)
    eps_hat, s_pred, pvars = model.taped_forward(tape, z_t, t, c)
    ldm = tape.l2(eps_hat, tape.leaf(eps))
    weights = schedule.sqrt_alpha_bar(t).reshape(-1, 1)
    ls = tape.l1(s_pred, tape.leaf(s_gt), weights=weights)
    total = tape.add(ldm, tape.mul(tape.leaf(np.array([[lam]])), ls))
    return tape, total, ldm, ls, pvars


def train_synthesizer(dataset: ShapeDataset, config: SynthTrainConfig,
                      seed: int) -> tuple[DenoiserModel, NoiseSchedule, list[dict]]:
    """Train the conditional denoiser on the train split.

    Returns the model, its schedule and a per-epoch history of mean loss
    components. Raises NumericError with a diagnostic if the loss stops
    being finite.
    """
    train_idx = dataset.indices(split=TRAIN)
    for c in range(dataset.num_classes):
        if len(dataset.indices(split=TRAIN, label=c)) == 0:
            raise ContractError(f"train split has no samples for class {c}")

    schedule = build_schedule(config.steps, config.beta_min, config.beta_max)
    root = RngStream(seed)
    model = DenoiserModel.init(
        steps=config.steps, num_classes=dataset.num_classes,
        image_dim=dataset.side * dataset.side, embed_dim=config.embed_dim,
        widths=(config.width1, config.width2), rng=root.derive(0))
    opt = adamw(model.params, lr=config.lr, weight_decay=config.weight_decay)

    z0_all = to_model_space(dataset.flat_pixels(train_idx))
    labels = dataset.labels[train_idx]
    sketches = dataset.flat_sketches(train_idx)
    n = len(train_idx)
    steps_per_epoch = (n + config.batch_size - 1) // config.batch_size

    history = []
    for epoch in range(config.epochs):
        erng = root.derive(1, epoch)
        perm = erng.permutation(n)
        sums = np.zeros(3)
        for b in range(steps_per_epoch):
            idx = perm[b * config.batch_size:(b + 1) * config.batch_size]
            z0 = z0_all[idx]
            t = erng.integers(1, schedule.T + 1, shape=len(idx))
            eps = erng.normal(z0.shape)
            tape, total, ldm, ls, pvars = batch_loss(
                model, schedule, z0, t, eps, labels[idx], sketches[idx],
                config.lambda_sketch)
            loss = float(total.value[0, 0])
            if not np.isfinite(loss):
                raise NumericError(
                    f"training diverged: loss={loss} at epoch {epoch} step {b}")
            grads = tape.backward(total)
            opt.step({k: grads.wrt(v) for k, v in pvars.items()})
            sums += (loss, float(ldm.value[0, 0]), float(ls.value[0, 0]))
        mean = sums / steps_per_epoch
        history.append({"epoch": epoch, "loss": mean[0], "ldm": mean[1], "sketch": mean[2]})
    return model, schedule, history
