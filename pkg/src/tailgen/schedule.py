"""Forward diffusion schedule and corruption process."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractError


@dataclass(frozen=True)
class NoiseSchedule:
    """Per-step variances and their running products, 1-indexed in t.

    betas[t-1] is the step-t variance; alpha_bar(t) the cumulative signal
    retention after t steps. alpha_bar(0) = 1 by convention, which makes
    the step-1 posterior variance exactly zero.
    """

    betas: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.betas, dtype=np.float64)
        if b.ndim != 1 or b.size < 2:
            raise ConfigError("schedule needs at least 2 steps")
        if not (0.0 < b.min() and b.max() < 1.0):
            raise ConfigError("betas must lie strictly inside (0, 1)")
        object.__setattr__(self, "betas", b)
        object.__setattr__(self, "alphas", 1.0 - b)
        object.__setattr__(self, "alpha_bars", np.cumprod(1.0 - b))

    @property
    def T(self) -> int:
        return self.betas.size

    def _check_t(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.int64)
        if t.size == 0 or t.min() < 1 or t.max() > self.T:
            raise ContractError(f"t must be in [1, {self.T}]")
        return t

    def beta(self, t):
        return self.betas[self._check_t(t) - 1]

    def alpha(self, t):
        return self.alphas[self._check_t(t) - 1]

    def alpha_bar(self, t):
        return self.alpha_bars[self._check_t(t) - 1]

    def sqrt_alpha_bar(self, t):
        return np.sqrt(self.alpha_bar(t))

    def posterior_variance(self, t):
        """beta_t * (1 - alpha_bar_{t-1}) / (1 - alpha_bar_t)."""
        t = self._check_t(t)
        ab_prev = np.where(t > 1, self.alpha_bars[np.maximum(t - 2, 0)], 1.0)
        return self.betas[t - 1] * (1.0 - ab_prev) / (1.0 - self.alpha_bars[t - 1])


def build_schedule(steps: int, beta_min: float, beta_max: float) -> NoiseSchedule:
    """Linear beta interpolation over the given number of steps."""
    if steps < 2:
        raise ConfigError(f"steps must be >= 2, got {steps}")
    if not (0.0 < beta_min <= beta_max < 1.0):
        raise ConfigError(f"need 0 < beta_min <= beta_max < 1, got [{beta_min}, {beta_max}]")
    return NoiseSchedule(np.linspace(beta_min, beta_max, steps))


def forward_diffuse(z0: np.ndarray, t, eps: np.ndarray, schedule: NoiseSchedule) -> np.ndarray:
    """z_t = sqrt(alpha_bar_t) * z0 + sqrt(1 - alpha_bar_t) * eps.

    t may be a scalar or one step index per row of a batched z0.
    """
    z0 = np.asarray(z0, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    if eps.shape != z0.shape:
        raise ContractError(f"noise shape {eps.shape} != signal shape {z0.shape}")
    ab = schedule.alpha_bar(t)
    if np.ndim(ab) > 0 and z0.ndim > 1:
        if ab.shape[0] != z0.shape[0]:
            raise ContractError("one step index per batch row required")
        ab = ab.reshape((-1,) + (1,) * (z0.ndim - 1))
    return np.sqrt(ab) * z0 + np.sqrt(1.0 - ab) * eps
