from .checkpoint import CHECKPOINT_VERSION, Checkpoint, load_checkpoint, save_checkpoint
from .experiments import (
    DATA_ROOT_ENV, DatasetSelector, ExperimentResult, ExperimentSpec,
    evaluate_on_index, load_result, reevaluate, run, score_video,
    select_videos, split_train_val,
)
from .grid import parse_grid
from .tables import emit_table

__all__ = [
    "CHECKPOINT_VERSION", "Checkpoint", "load_checkpoint", "save_checkpoint",
    "DATA_ROOT_ENV", "DatasetSelector", "ExperimentResult", "ExperimentSpec",
    "evaluate_on_index", "load_result", "reevaluate", "run", "score_video",
    "select_videos", "split_train_val",
    "parse_grid", "emit_table",
]
