"""Synthetic long-tailed shape benchmark.

Each class renders one parametric shape family on a 16x16 grayscale
canvas. A family is a signed inside-ness field plus a canonical anchor
offset from the canvas center; rendering applies seeded jitter in center
(+-2 px), scale (+-20%) and fill intensity (+-0.2), soft antialiased
edges, then additive Gaussian pixel noise. The anchors and sizes were
tuned so a plain nearest-centroid classifier separates clean renders,
which keeps downstream accuracy differences attributable to class
imbalance rather than an unlearnable benchmark.

Pixels are quantized to the 8-bit grid at creation so the on-disk format
round-trips exactly, and the stored sketch is always the extractor
applied to those exact pixels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .profiles import LongTailProfile
from .rng import RngStream
from .sketch import extract_sketch

SIDE = 16
BASE_INTENSITY = 0.75
INTENSITY_JITTER = 0.2
CENTER_JITTER = 2.0
SCALE_JITTER = 0.2
NOISE_SIGMA = 0.05
EDGE_SOFTNESS = 2.0  # px over which the antialiased edge ramps

TRAIN, VAL, TEST = 0, 1, 2
SPLIT_NAMES = ("train", "val", "test")


def _r(dx, dy):
    return np.sqrt(dx * dx + dy * dy)


# Signed fields: positive inside the shape, roughly in pixels.

def _disk(dx, dy, s):
    return 5.6 * s - _r(dx, dy)


def _square(dx, dy, s):
    return 3.4 * s - np.maximum(np.abs(dx), np.abs(dy))


def _triangle(dx, dy, s):
    h = 4.7 * s
    return np.minimum(np.minimum(dy + h, h - dy), ((dy + h) * 0.64 - np.abs(dx)) / 1.2)


def _cross(dx, dy, s):
    t, r = 0.9 * s, 7.4 * s
    return np.maximum(np.minimum(t - np.abs(dx), r - np.abs(dy)),
                      np.minimum(t - np.abs(dy), r - np.abs(dx)))


def _ring(dx, dy, s):
    d = _r(dx, dy)
    return np.minimum(d - 3.6 * s, 5.2 * s - d)


def _two_bars(dx, dy, s):
    return np.minimum(0.9 * s - np.abs(np.abs(dx) - 5.2 * s), 6.6 * s - np.abs(dy))


def _dot_grid(dx, dy, s):
    # 2x2 grid of dots at (+-g, +-g)
    g = 2.4 * s
    return 1.25 * s - _r(dx - np.where(dx >= 0, g, -g), dy - np.where(dy >= 0, g, -g))


def _diamond(dx, dy, s):
    return 3.4 * s - (np.abs(dx) + np.abs(dy))


def _frame(dx, dy, s):
    m = np.maximum(np.abs(dx), np.abs(dy))
    return np.minimum(m - 4.2 * s, 5.8 * s - m)


def _x_cross(dx, dy, s):
    t, box = 1.0 * s * np.sqrt(2.0), 6.8 * s
    arms = np.maximum(t - np.abs(dx - dy), t - np.abs(dx + dy))
    return np.minimum(arms, box - np.maximum(np.abs(dx), np.abs(dy)))


def _h_bars(dx, dy, s):
    return np.minimum(0.9 * s - np.abs(np.abs(dy) - 4.8 * s), 6.6 * s - np.abs(dx))


def _checker(dx, dy, s):
    h = 4.0 * s
    inside = h - np.maximum(np.abs(dx), np.abs(dy))
    quad = np.where((dx > 0) ^ (dy > 0), 1.0, -1.0)
    return np.minimum(inside, quad * np.minimum(np.abs(dx), np.abs(dy)))


def _l_shape(dx, dy, s):
    r, t = 4.6 * s, 1.3 * s
    vert = np.minimum(t - np.abs(dx + r - t), r - np.abs(dy))
    horz = np.minimum(t - np.abs(dy - r + t), r - np.abs(dx))
    return np.maximum(vert, horz)


def _t_shape(dx, dy, s):
    r, t = 4.6 * s, 1.3 * s
    top = np.minimum(t - np.abs(dy + r - t), r - np.abs(dx))
    stem = np.minimum(t - np.abs(dx), r - np.abs(dy))
    return np.maximum(top, stem)


def _stripe(dx, dy, s):
    t, box = 1.3 * s * np.sqrt(2.0), 5.4 * s
    return np.minimum(t - np.abs(dx - dy), box - np.maximum(np.abs(dx), np.abs(dy)))


def _hollow_diamond(dx, dy, s):
    m = np.abs(dx) + np.abs(dy)
    return np.minimum(m - 3.4 * s, 5.4 * s - m)


FAMILIES = (
    _disk, _square, _triangle, _cross, _ring, _two_bars, _dot_grid, _diamond,
    _frame, _x_cross, _h_bars, _checker, _l_shape, _t_shape, _stripe, _hollow_diamond,
)

FAMILY_NAMES = (
    "disk", "square", "triangle", "cross", "ring", "two-bars", "dot-grid", "diamond",
    "frame", "x-cross", "h-bars", "checker", "l-shape", "t-shape", "stripe", "hollow-diamond",
)

# Canonical anchor of each family, as an offset from the canvas center.
FAMILY_ANCHORS = (
    (1.2, -0.7), (-2.7, -2.7), (-1.7, 2.2), (-0.9, -0.9),
    (2.5, 2.5), (0.0, 0.9), (-0.4, -0.4), (2.7, -2.7),
    (0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (-2.5, 2.5),
    (1.5, 1.5), (0.0, -1.5), (0.0, 0.0), (-1.5, -1.5),
)


class ImageSample(NamedTuple):
    pixels: np.ndarray
    label: int
    sketch: np.ndarray
    split: int


@dataclass
class ShapeDataset:
    side: int
    num_classes: int
    class_counts: list[int]
    pixels: np.ndarray    # (N, side, side) float64 on the 1/255 grid
    labels: np.ndarray    # (N,) int64
    sketches: np.ndarray  # (N, side, side) uint8
    splits: np.ndarray    # (N,) uint8

    def __len__(self) -> int:
        return self.labels.shape[0]

    def sample(self, i: int) -> ImageSample:
        return ImageSample(self.pixels[i], int(self.labels[i]),
                           self.sketches[i], int(self.splits[i]))

    def indices(self, split: int | None = None, label: int | None = None) -> np.ndarray:
        mask = np.ones(len(self), dtype=bool)
        if split is not None:
            mask &= self.splits == split
        if label is not None:
            mask &= self.labels == label
        return np.nonzero(mask)[0]

    def flat_pixels(self, idx: np.ndarray) -> np.ndarray:
        """(n, side*side) view of selected images."""
        return self.pixels[idx].reshape(len(idx), -1)

    def flat_sketches(self, idx: np.ndarray) -> np.ndarray:
        return self.sketches[idx].reshape(len(idx), -1).astype(np.float64)

    def train_class_counts(self) -> list[int]:
        return [int(np.sum((self.splits == TRAIN) & (self.labels == c)))
                for c in range(self.num_classes)]


def render_clean(family: int, cx: float, cy: float, scale: float,
                 intensity: float, side: int = SIDE) -> np.ndarray:
    """Noise-free antialiased render of one shape instance at center (cx, cy)."""
    yy, xx = np.mgrid[0:side, 0:side].astype(np.float64)
    field = FAMILIES[family](xx - cx, yy - cy, scale)
    alpha = np.clip(field / EDGE_SOFTNESS + 0.5, 0.0, 1.0)
    return intensity * alpha


def _draw_params(rng: RngStream, family: int, side: int) -> tuple[float, float, float, float]:
    ax, ay = FAMILY_ANCHORS[family]
    c0 = (side - 1) / 2.0
    cx = c0 + ax + rng.uniform(-CENTER_JITTER, CENTER_JITTER)
    cy = c0 + ay + rng.uniform(-CENTER_JITTER, CENTER_JITTER)
    scale = 1.0 + rng.uniform(-SCALE_JITTER, SCALE_JITTER)
    intensity = BASE_INTENSITY + rng.uniform(-INTENSITY_JITTER, INTENSITY_JITTER)
    return cx, cy, scale, intensity


def quantize(img: np.ndarray) -> np.ndarray:
    """Snap to the 8-bit grid so byte serialization is lossless."""
    return np.round(np.clip(img, 0.0, 1.0) * 255.0) / 255.0


def generate_dataset(profile: LongTailProfile, seed: int,
                     noise_sigma: float = NOISE_SIGMA) -> ShapeDataset:
    """Deterministic long-tailed dataset for the given profile and seed.

    Per-sample randomness is addressed by (seed, class, index), so the
    result is independent of generation order. Each class is split 7:1:2
    into train/val/test in index order.
    """
    counts = profile.class_counts()
    n_total = sum(counts)
    pixels = np.zeros((n_total, SIDE, SIDE))
    labels = np.zeros(n_total, dtype=np.int64)
    sketches = np.zeros((n_total, SIDE, SIDE), dtype=np.uint8)
    splits = np.zeros(n_total, dtype=np.uint8)

    root = RngStream(seed)
    pos = 0
    for c, n_c in enumerate(counts):
        n_train, n_val, _ = profile.split_counts(n_c)
        for i in range(n_c):
            rng = root.derive(c, i)
            cx, cy, scale, intensity = _draw_params(rng, c, SIDE)
            img = render_clean(c, cx, cy, scale, intensity)
            if noise_sigma > 0.0:
                img = img + rng.normal((SIDE, SIDE), scale=noise_sigma)
            img = quantize(img)
            pixels[pos] = img
            labels[pos] = c
            sketches[pos] = extract_sketch(img)
            if i < n_train:
                splits[pos] = TRAIN
            elif i < n_train + n_val:
                splits[pos] = VAL
            else:
                splits[pos] = TEST
            pos += 1

    return ShapeDataset(SIDE, profile.num_classes, counts, pixels, labels, sketches, splits)
