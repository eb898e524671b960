"""Long-tailed class-count profiles.

Class counts interpolate geometrically between the head count and
head/ratio, the standard construction when only the extreme imbalance
ratio is known. Per-class 7:1:2 train/val/test splits are computed here
so the generator and loaders agree on exact sizes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError

MIN_CLASS_COUNT = 4  # below this a 7:1:2 split cannot give every part a sample


@dataclass(frozen=True)
class LongTailProfile:
    num_classes: int
    head_count: int
    imbalance_ratio: float

    def __post_init__(self):
        if not 2 <= self.num_classes <= 16:
            raise ConfigError(f"num_classes must be in [2, 16], got {self.num_classes}")
        if not 1 <= self.head_count <= 5000:
            raise ConfigError(f"head_count must be in [1, 5000], got {self.head_count}")
        if self.imbalance_ratio < 1.0:
            raise ConfigError(f"imbalance_ratio must be >= 1, got {self.imbalance_ratio}")
        tail = self.class_counts()[-1]
        if tail < MIN_CLASS_COUNT:
            raise ConfigError(
                f"tail class count {tail} < {MIN_CLASS_COUNT}: cannot split 7:1:2")

    def class_counts(self) -> list[int]:
        """n_c = round(head * ratio^(-c/(C-1))), non-increasing in c."""
        c_max = self.num_classes - 1
        counts = []
        for c in range(self.num_classes):
            counts.append(int(round(self.head_count * self.imbalance_ratio ** (-c / c_max))))
        return counts

    def split_counts(self, n: int) -> tuple[int, int, int]:
        """(train, val, test) sizes for one class of n samples, 7:1:2."""
        val = max(1, round(0.1 * n))
        test = max(1, round(0.2 * n))
        train = n - val - test
        if train < 1:
            raise ConfigError(f"class of {n} samples cannot be split 7:1:2")
        return train, val, test
