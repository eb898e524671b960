"""Ancestral reverse-process sampling and the per-class synthetic pool."""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .denoiser import DenoiserModel, to_pixel_space
from .errors import ContractError, CorruptionError, FormatError, ModelError, NumericError
from .rng import RngStream
from .schedule import NoiseSchedule
from .shapes import quantize


def sample(model: DenoiserModel, schedule: NoiseSchedule, class_idx: int,
           n: int, seed: int) -> np.ndarray:
    """Generate n class-conditional images by the full reverse chain.

    Starts from Gaussian noise and applies the standard ancestral update
    with posterior variance; only (t, class) condition the denoiser, the
    sketch head plays no role here. Output is (n, side, side) in [0, 1],
    bit-reproducible for a fixed (model, class, seed).
    """
    if not 0 <= class_idx < model.num_classes:
        raise ContractError(f"class {class_idx} out of range [0, {model.num_classes})")
    if any(not np.all(np.isfinite(v)) for v in model.params.values()):
        raise ModelError("model parameters are not finite")
    side = int(round(model.image_dim ** 0.5))
    if side * side != model.image_dim:
        raise ModelError(f"image_dim {model.image_dim} is not a square")
    if n == 0:
        return np.zeros((0, side, side))

    rng = RngStream(seed).derive(class_idx)
    z = rng.normal((n, model.image_dim))
    c_vec = np.full(n, class_idx, dtype=np.int64)
    for t in range(schedule.T, 0, -1):
        t_vec = np.full(n, t, dtype=np.int64)
        eps_hat, _ = model.predict(z, t_vec, c_vec)
        beta = float(schedule.beta(t))
        ab = float(schedule.alpha_bar(t))
        ab_prev = float(schedule.alpha_bar(t - 1)) if t > 1 else 1.0
        # posterior mean through the clamped clean estimate; the clamp keeps
        # an imperfect predictor from drifting the chain out of data range
        x0_hat = np.clip((z - np.sqrt(1.0 - ab) * eps_hat) / np.sqrt(ab), -1.0, 1.0)
        mean = (np.sqrt(ab_prev) * beta * x0_hat
                + np.sqrt(1.0 - beta) * (1.0 - ab_prev) * z) / (1.0 - ab)
        if t > 1:
            sigma = np.sqrt(float(schedule.posterior_variance(t)))
            z = mean + sigma * rng.normal(z.shape)
        else:
            z = mean
        if not np.all(np.isfinite(z)):
            raise NumericError(f"reverse chain produced non-finite values at step {t}")
    return to_pixel_space(z).reshape(n, side, side)


@dataclass
class SynthPool:
    """Pre-generated class-conditional images plus provenance."""

    images: np.ndarray  # (C, per_class, side, side), values on the 1/255 grid
    seed: int
    checkpoint_epochs: int
    lambda_sketch: float

    @property
    def num_classes(self) -> int:
        return self.images.shape[0]

    @property
    def per_class(self) -> int:
        return self.images.shape[1]

    def flat_class(self, c: int) -> np.ndarray:
        imgs = self.images[c]
        return imgs.reshape(imgs.shape[0], -1)


def build_pool(model: DenoiserModel, schedule: NoiseSchedule, per_class: int,
               seed: int, checkpoint_epochs: int = 0,
               lambda_sketch: float = 0.0) -> SynthPool:
    side = int(round(model.image_dim ** 0.5))
    images = np.zeros((model.num_classes, per_class, side, side))
    for c in range(model.num_classes):
        images[c] = quantize(sample(model, schedule, c, per_class, seed))
    return SynthPool(images, seed, checkpoint_epochs, lambda_sketch)


POOL_MAGIC = b"LTPL"


def save_pool(pool: SynthPool, path: str | Path) -> None:
    c, per, side, _ = pool.images.shape
    out = bytearray()
    out += POOL_MAGIC
    out += struct.pack("<IIIIQd", c, per, side, pool.checkpoint_epochs,
                       pool.seed, pool.lambda_sketch)
    out += np.round(pool.images * 255.0).astype(np.uint8).tobytes()
    out += struct.pack("<I", zlib.crc32(bytes(out)) & 0xFFFFFFFF)
    Path(path).write_bytes(bytes(out))


def load_pool(path: str | Path) -> SynthPool:
    raw = Path(path).read_bytes()
    if len(raw) < 4 or raw[:4] != POOL_MAGIC:
        raise FormatError(f"{path}: bad magic, not a pool file")
    (stored_crc,) = struct.unpack_from("<I", raw, len(raw) - 4)
    if zlib.crc32(raw[:-4]) & 0xFFFFFFFF != stored_crc:
        raise CorruptionError(f"{path}: checksum mismatch")
    c, per, side, epochs, seed, lam = struct.unpack_from("<IIIIQd", raw, 4)
    off = 4 + struct.calcsize("<IIIIQd")
    count = c * per * side * side
    if len(raw) != off + count + 4:
        raise CorruptionError(f"{path}: payload size mismatch")
    images = np.frombuffer(raw, dtype=np.uint8, count=count, offset=off)
    images = images.reshape(c, per, side, side).astype(np.float64) / 255.0
    return SynthPool(images, seed, epochs, lam)
