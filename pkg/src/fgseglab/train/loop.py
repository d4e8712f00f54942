"""Epoch loop: shuffled mini-batches, weighted BCE, plateau LR, early stop.

Fully seeded and single-threaded, so repeated runs with the same inputs
produce bit-identical loss/lr sequences and parameters.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..data.types import FramePair
from ..errors import ConfigurationError, TrainingDivergedError
from ..model.executor import run_backward, run_forward
from ..model.graph import NetworkGraph
from ..model.params import ParameterSet
from .callbacks import EarlyStopping, ReduceLROnPlateau
from .loss import fg_weight, weighted_bce_with_grad
from .optim import make_optimizer
from .schedule import TrainSchedule

log = logging.getLogger(__name__)


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float
    lr: float
    seconds: float


@dataclass
class TrainHistory:
    records: list[EpochRecord] = field(default_factory=list)
    stop_reason: str = "max_epochs"    # max_epochs | early_stop

    @property
    def best_epoch(self) -> int:
        return min(self.records, key=lambda r: r.val_loss).epoch

    @property
    def best_val_loss(self) -> float:
        return min(r.val_loss for r in self.records)

    def to_dict(self) -> dict:
        return {"stop_reason": self.stop_reason,
                "records": [vars(r) for r in self.records]}


def _stack(pairs: list[FramePair]):
    images = np.stack([p.image for p in pairs]).astype(np.float32)
    masks = np.stack([p.mask for p in pairs])
    return images, masks


def _batches(order, batch_size):
    for i in range(0, len(order), batch_size):
        yield order[i:i + batch_size]


def batch_loss(graph, pset, pairs, schedule, mode="eval"):
    """Weighted BCE of one batch without gradients."""
    images, masks = _stack(pairs)
    acts, _ = run_forward(graph, pset, images, mode=mode)
    probs = acts[graph.taps["probabilities"]][..., 0]
    w = fg_weight(masks, schedule.fg_weight_policy)
    loss, _ = weighted_bce_with_grad(probs, masks, w, need_grad=False)
    return loss


def evaluate_loss(graph, pset, pairs, schedule):
    """Mean validation loss over mini-batches (inference mode)."""
    losses = [batch_loss(graph, pset, pairs[i:i + schedule.batch_size], schedule)
              for i in range(0, len(pairs), schedule.batch_size)]
    return float(np.mean(losses))


def train(graph: NetworkGraph, pset: ParameterSet,
          train_pairs: list[FramePair], val_pairs: list[FramePair],
          schedule: TrainSchedule) -> tuple[ParameterSet, TrainHistory]:
    """Run the full training recipe; returns the best-epoch parameters.

    The returned ParameterSet is the snapshot from the epoch with the lowest
    validation loss; the input set is left at its final state.
    """
    schedule.validate()
    if not train_pairs or not val_pairs:
        raise ConfigurationError("train() needs non-empty train and val sets")
    size = graph.input_size
    for p in train_pairs + val_pairs:
        if p.image.shape[:2] != (size, size):
            raise ConfigurationError(
                f"frame {p.source} is {p.image.shape[:2]}, model wants {size}x{size}")

    optimizer = make_optimizer(schedule)
    plateau = ReduceLROnPlateau(schedule.initial_lr, factor=schedule.plateau_factor,
                                patience=schedule.plateau_patience)
    stopper = EarlyStopping(patience=schedule.early_stop_patience)

    shuffle_rng = np.random.default_rng(schedule.seed)
    dropout_rng = np.random.default_rng(schedule.seed + 1)

    history = TrainHistory()
    best_params = pset.copy()
    best_val = math.inf

    for epoch in range(1, schedule.max_epochs + 1):
        t0 = time.perf_counter()
        lr = plateau.lr
        optimizer.lr = lr

        order = shuffle_rng.permutation(len(train_pairs))
        epoch_losses = []
        for bi, batch_idx in enumerate(_batches(order, schedule.batch_size)):
            pairs = [train_pairs[i] for i in batch_idx]
            images, masks = _stack(pairs)
            acts, caches = run_forward(graph, pset, images, mode="train",
                                       rng=dropout_rng, keep_caches=True)
            probs = acts[graph.taps["probabilities"]][..., 0]
            w = fg_weight(masks, schedule.fg_weight_policy)
            loss, dprobs = weighted_bce_with_grad(probs, masks, w)
            if not math.isfinite(loss):
                raise TrainingDivergedError(
                    f"non-finite loss at epoch {epoch}, batch {bi}, lr {lr:g}",
                    epoch=epoch, batch=bi, lr=lr)
            grads = run_backward(graph, pset, acts, caches, dprobs[..., None])
            optimizer.step(pset, grads)
            epoch_losses.append(loss)

        val_loss = evaluate_loss(graph, pset, val_pairs, schedule)
        history.records.append(EpochRecord(
            epoch=epoch, train_loss=float(np.mean(epoch_losses)),
            val_loss=val_loss, lr=lr, seconds=time.perf_counter() - t0))

        if val_loss < best_val:
            best_val = val_loss
            best_params = pset.copy()

        plateau.update(val_loss)
        if stopper.update(val_loss):
            history.stop_reason = "early_stop"
            log.info("early stop at epoch %d (best val %.6f)", epoch, best_val)
            break

    return best_params, history
