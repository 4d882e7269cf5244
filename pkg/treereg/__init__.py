from .errors import (
    ConfigError,
    DataError,
    GraphError,
    InsufficientSamplesError,
    ModelError,
    RegionError,
    ShapeError,
    TrainingDiverged,
    TreeRegError,
)
from .options import PRESETS, RunConfig

__version__ = "0.1.0"

__all__ = [
    "PRESETS",
    "ConfigError",
    "DataError",
    "GraphError",
    "InsufficientSamplesError",
    "ModelError",
    "RegionError",
    "RunConfig",
    "ShapeError",
    "TrainingDiverged",
    "TreeRegError",
]
