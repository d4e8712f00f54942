"""Validation-loss callbacks: reduce-on-plateau and early stopping.

Both treat "improvement" as beating the running best by more than
``min_delta`` and keep independent patience counters.
"""

from __future__ import annotations

MIN_DELTA = 1e-4
LR_FLOOR = 1e-7


class ReduceLROnPlateau:
    """Multiply the learning rate by ``factor`` after ``patience``
    consecutive non-improving epochs; never drops below LR_FLOOR."""

    def __init__(self, initial_lr, factor=0.1, patience=5, min_delta=MIN_DELTA,
                 floor=LR_FLOOR):
        self.lr = float(initial_lr)
        self.factor = factor
        self.patience = patience
        self.min_delta = min_delta
        self.floor = floor
        self.best = None
        self.wait = 0

    def update(self, val_loss: float) -> float:
        """Record one epoch's validation loss; returns the lr to use next."""
        if self.best is None or val_loss < self.best - self.min_delta:
            self.best = val_loss
            self.wait = 0
        else:
            self.wait += 1
            if self.wait >= self.patience:
                self.lr = max(self.lr * self.factor, self.floor)
                self.wait = 0
        return self.lr


class EarlyStopping:
    """True once ``patience`` consecutive epochs fail to improve."""

    def __init__(self, patience=10, min_delta=MIN_DELTA):
        self.patience = patience
        self.min_delta = min_delta
        self.best = None
        self.wait = 0

    def update(self, val_loss: float) -> bool:
        if self.best is None or val_loss < self.best - self.min_delta:
            self.best = val_loss
            self.wait = 0
            return False
        self.wait += 1
        return self.wait >= self.patience
