from .callbacks import EarlyStopping, ReduceLROnPlateau, LR_FLOOR, MIN_DELTA
from .loss import FgWeightPolicy, fg_weight, weighted_bce, weighted_bce_with_grad
from .loop import EpochRecord, TrainHistory, evaluate_loss, train
from .optim import make_optimizer
from .schedule import OPTIMIZERS, TrainSchedule

__all__ = [
    "EarlyStopping", "ReduceLROnPlateau", "LR_FLOOR", "MIN_DELTA",
    "FgWeightPolicy", "fg_weight", "weighted_bce", "weighted_bce_with_grad",
    "EpochRecord", "TrainHistory", "evaluate_loss", "train",
    "make_optimizer", "OPTIMIZERS", "TrainSchedule",
]
