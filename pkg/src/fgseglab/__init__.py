"""fgseglab: foreground/background segmentation networks, training recipe,
change-detection metrics and an ablation harness, all on plain numpy."""

from . import data, harness, metrics, model, train, viz
from .errors import (
    CheckpointError, ConfigurationError, DataError, DimensionError,
    EvaluationError, FgSegLabError, GridParseError, ScanError,
    TrainingDivergedError, WeightLoadError,
)

__version__ = "0.1.0"

__all__ = [
    "data", "harness", "metrics", "model", "train", "viz",
    "CheckpointError", "ConfigurationError", "DataError", "DimensionError",
    "EvaluationError", "FgSegLabError", "GridParseError", "ScanError",
    "TrainingDivergedError", "WeightLoadError",
]
