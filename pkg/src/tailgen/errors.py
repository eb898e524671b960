"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: config problems exit 2, missing or
damaged artifacts exit 3, numerical failures exit 4.
"""


class TailgenError(Exception):
    """Base class for all package errors."""


class ShapeError(TailgenError):
    """Dimension mismatch in a linear algebra or tape operation."""


class ContractError(TailgenError):
    """A documented precondition was violated by the caller."""


class NumericError(TailgenError):
    """Numerical failure: divergence, non-convergence, degenerate input."""


class NotPsdError(NumericError):
    """Matrix claimed positive semidefinite has a materially negative eigenvalue."""


class ConfigError(TailgenError):
    """Invalid configuration value, unknown key, or unusable profile."""


class FormatError(TailgenError):
    """On-disk artifact has the wrong magic or an unreadable layout."""


class CorruptionError(FormatError):
    """On-disk artifact is truncated or fails its checksum."""


class PoolError(TailgenError):
    """Synthetic pool cannot satisfy a requested draw."""


class ModelError(TailgenError):
    """Checkpoint or model state is unusable."""


class DependencyError(TailgenError):
    """A pipeline stage requires an artifact that is absent or stale."""
