"""Long-tailed classification benchmark: conditional diffusion synthesis
with sketch-grounded supervision, plus an RL-driven class-adaptive sampler
for batch composition during classifier training."""

__version__ = "0.1.0"
