"""Foreground-weighted binary cross entropy and the batch weight policy."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..data.types import BG, FG, IGNORE
from ..errors import ConfigurationError

log = logging.getLogger(__name__)

PROB_CLIP = 1e-7


@dataclass
class FgWeightPolicy:
    """How much extra weight foreground pixels get in the loss.

    ``ratio`` mode uses the background/foreground pixel ratio of the batch,
    clamped to [1, max_weight]; a batch without foreground gets weight 1.
    """

    mode: str = "ratio"
    fixed_value: float = 1.0
    max_weight: float = 50.0
    epsilon: float = 1e-12

    def validate(self):
        if self.mode not in ("ratio", "fixed"):
            raise ConfigurationError(f"fg_weight_policy.mode: unknown {self.mode!r}")
        if self.max_weight < 1:
            raise ConfigurationError(
                f"fg_weight_policy.max_weight must be >= 1, got {self.max_weight}")
        if self.fixed_value <= 0 or self.epsilon <= 0:
            raise ConfigurationError(
                "fg_weight_policy fixed_value and epsilon must be positive")


def fg_weight(masks: np.ndarray, policy: FgWeightPolicy) -> float:
    """Foreground weight for one batch of label masks."""
    policy.validate()
    if policy.mode == "fixed":
        return float(policy.fixed_value)
    valid = masks != IGNORE
    n_valid = int(np.count_nonzero(valid))
    if n_valid == 0:
        log.warning("fg_weight: batch is all-ignore, using weight 1")
        return 1.0
    n_fg = int(np.count_nonzero(masks == FG))
    if n_fg == 0:
        return 1.0
    n_bg = n_valid - n_fg
    raw = n_bg / (n_fg + policy.epsilon)
    return float(min(max(raw, 1.0), policy.max_weight))


def weighted_bce(probs: np.ndarray, masks: np.ndarray, weight: float) -> float:
    """Mean over non-ignore pixels of -[w*y*log(p) + (1-y)*log(1-p)].

    Probabilities are clipped to [1e-7, 1-1e-7] before the logs.  An empty
    non-ignore set yields 0 with a warning.
    """
    loss, _ = weighted_bce_with_grad(probs, masks, weight, need_grad=False)
    return loss


def weighted_bce_with_grad(probs, masks, weight, need_grad=True):
    """Loss plus its gradient with respect to the (unclipped) probabilities.

    The gradient is -[w*y/p - (1-y)/(1-p)] / N on non-ignore pixels inside
    the clip range and 0 elsewhere.
    """
    probs = np.asarray(probs)
    masks = np.asarray(masks)
    if probs.shape != masks.shape:
        raise ValueError(f"probs shape {probs.shape} != masks shape {masks.shape}")
    valid = masks != IGNORE
    n = int(np.count_nonzero(valid))
    if n == 0:
        log.warning("weighted_bce: no non-ignore pixels, loss is 0")
        return 0.0, np.zeros_like(probs)
    y = (masks == FG).astype(probs.dtype)
    p = np.clip(probs, PROB_CLIP, 1.0 - PROB_CLIP)
    terms = -(weight * y * np.log(p) + (1.0 - y) * np.log1p(-p))
    loss = float(terms[valid].sum() / n)
    if not need_grad:
        return loss, None
    grad = np.zeros_like(probs)
    inside = valid & (probs > PROB_CLIP) & (probs < 1.0 - PROB_CLIP)
    grad[inside] = (-(weight * y[inside] / p[inside])
                    + (1.0 - y[inside]) / (1.0 - p[inside])) / n
    return loss, grad
