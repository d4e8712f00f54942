"""Training schedule: optimizer choice, learning-rate plan, stopping rules."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

from ..errors import ConfigurationError
from .loss import FgWeightPolicy

OPTIMIZERS = ("adam", "rmsprop", "sgd", "adagrad", "adadelta")


@dataclass
class TrainSchedule:
    optimizer: str = "adam"
    initial_lr: float = 1e-4
    plateau_factor: float = 0.1
    plateau_patience: int = 5
    early_stop_patience: int = 10
    max_epochs: int = 80
    batch_size: int = 4
    fg_weight_policy: FgWeightPolicy = field(default_factory=FgWeightPolicy)
    seed: int = 0

    def validate(self):
        if self.optimizer not in OPTIMIZERS:
            raise ConfigurationError(f"optimizer: unknown value {self.optimizer!r}")
        if self.initial_lr <= 0:
            raise ConfigurationError(f"initial_lr must be positive, got {self.initial_lr}")
        if not 0.0 < self.plateau_factor < 1.0:
            raise ConfigurationError(
                f"plateau_factor must be in (0,1), got {self.plateau_factor}")
        if not self.early_stop_patience >= self.plateau_patience > 0:
            raise ConfigurationError(
                "need early_stop_patience >= plateau_patience > 0, got "
                f"{self.early_stop_patience} / {self.plateau_patience}")
        if self.max_epochs < 1:
            raise ConfigurationError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.batch_size < 1:
            raise ConfigurationError(f"batch_size must be >= 1, got {self.batch_size}")
        self.fg_weight_policy.validate()

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "TrainSchedule":
        data = dict(data)
        policy = FgWeightPolicy(**data.pop("fg_weight_policy", {}))
        return cls(fg_weight_policy=policy, **data)
