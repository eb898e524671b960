"""Counter-based random streams.

Every stochastic component draws from an `RngStream` addressed by
(seed, stream path). Streams are built on numpy's Philox counter-based
generator keyed through `SeedSequence` spawn keys, so a stream's draw
sequence depends only on its address, never on the order in which other
streams were created or consumed. That is what makes per-class sampling
and the K parallel sampler episodes replayable.
"""

from __future__ import annotations

import numpy as np


class RngStream:
    """Deterministic random stream addressed by (seed, stream path)."""

    def __init__(self, seed: int, stream: int = 0, _path: tuple[int, ...] = ()):
        if seed < 0:
            raise ValueError("seed must be non-negative")
        self.seed = int(seed)
        self.path = (int(stream),) + tuple(int(p) for p in _path) if _path else (int(stream),)
        seq = np.random.SeedSequence(self.seed, spawn_key=self.path)
        self._gen = np.random.Generator(np.random.Philox(seq))

    @property
    def stream(self) -> int:
        return self.path[0]

    def derive(self, *key: int) -> "RngStream":
        """Child stream at a sub-address; independent of draws made here."""
        child = RngStream.__new__(RngStream)
        child.seed = self.seed
        child.path = self.path + tuple(int(k) for k in key)
        seq = np.random.SeedSequence(child.seed, spawn_key=child.path)
        child._gen = np.random.Generator(np.random.Philox(seq))
        return child

    # thin wrappers so call sites never touch the Generator directly

    def normal(self, shape=None, loc: float = 0.0, scale: float = 1.0) -> np.ndarray:
        return self._gen.normal(loc, scale, size=shape)

    def uniform(self, low: float = 0.0, high: float = 1.0, shape=None) -> np.ndarray:
        return self._gen.uniform(low, high, size=shape)

    def integers(self, low: int, high: int, shape=None) -> np.ndarray:
        """Integers in [low, high), matching numpy's half-open convention."""
        return self._gen.integers(low, high, size=shape)

    def choice(self, n: int, size: int, replace: bool = True, p=None) -> np.ndarray:
        return self._gen.choice(n, size=size, replace=replace, p=p)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, path={self.path})"
