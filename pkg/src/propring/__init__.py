"""Exact computation in truncated completed group rings of two families of
3f-dimensional p-valued groups, plus the verification harness built on it."""

from .config import PrimeConfig
from .errors import (
    BoundExceeded,
    ConfigError,
    ConfigMismatch,
    CutoffBeyondFaithful,
    InputNotUnitOne,
    LevelTooDeep,
    NonConvergent,
    NonHomogeneousInput,
    NotInGroup,
    PropringError,
    RelationCheckFailed,
)

__all__ = [
    "PrimeConfig",
    "PropringError",
    "ConfigError",
    "ConfigMismatch",
    "InputNotUnitOne",
    "NotInGroup",
    "LevelTooDeep",
    "CutoffBeyondFaithful",
    "NonHomogeneousInput",
    "NonConvergent",
    "RelationCheckFailed",
    "BoundExceeded",
]

__version__ = "0.1.0"
