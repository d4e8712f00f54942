"""Probability-mask visualization: threshold, jet heatmap, alpha blend.

All 8-bit quantization rounds half up (floor(x + 0.5)) so outputs are
bit-exact across platforms.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DimensionError

# value -> RGB anchors of the jet ramp; linear interpolation in between.
JET_ANCHORS = (
    (0.00, (0, 0, 255)),
    (0.25, (0, 255, 255)),
    (0.50, (0, 255, 0)),
    (0.75, (255, 255, 0)),
    (1.00, (255, 0, 0)),
)


def _round_half_up(x: np.ndarray) -> np.ndarray:
    return np.floor(x + 0.5).astype(np.uint8)


def threshold(probs: np.ndarray, theta: float = 0.5) -> np.ndarray:
    """Boolean foreground mask: p >= theta."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"threshold must be in [0,1], got {theta}")
    return np.asarray(probs) >= theta


def heatmap(probs: np.ndarray) -> np.ndarray:
    """Jet heatmap of a probability map; returns HxWx3 uint8."""
    probs = np.asarray(probs, dtype=np.float64)
    if probs.min() < 0.0 or probs.max() > 1.0:
        raise ValueError("heatmap expects probabilities in [0,1]")
    xs = np.array([a[0] for a in JET_ANCHORS])
    out = np.empty(probs.shape + (3,), dtype=np.uint8)
    for ch in range(3):
        ys = np.array([a[1][ch] for a in JET_ANCHORS], dtype=np.float64)
        out[..., ch] = _round_half_up(np.interp(probs, xs, ys))
    return out


def blend(raw: np.ndarray, heat: np.ndarray, alpha: float = 0.5) -> np.ndarray:
    """Per-channel convex blend: round((1-alpha)*raw + alpha*heat)."""
    raw = np.asarray(raw)
    heat = np.asarray(heat)
    if raw.shape != heat.shape:
        raise DimensionError(f"raw shape {raw.shape} != heatmap shape {heat.shape}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0,1], got {alpha}")
    mixed = (1.0 - alpha) * raw.astype(np.float64) + alpha * heat.astype(np.float64)
    return _round_half_up(mixed)


def overlay_frame(image01: np.ndarray, probs: np.ndarray,
                  alpha: float = 0.5) -> np.ndarray:
    """Blend a [0,1] image with the jet heatmap of its probability map."""
    raw = _round_half_up(np.asarray(image01, dtype=np.float64) * 255.0)
    return blend(raw, heatmap(probs), alpha)


def write_outputs(frames, out_dir, theta: float = 0.5, alpha: float = 0.5) -> list[Path]:
    """Write one overlay and one binary mask PNG per (image, probs, stem).

    ``frames`` yields (image01 HxWx3, probs HxW, stem) triples.  Re-running
    with the same inputs overwrites the same file names.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for image01, probs, stem in frames:
        over = overlay_frame(image01, probs, alpha)
        binary = np.where(threshold(probs, theta), 255, 0).astype(np.uint8)
        over_path = out / f"{stem}_overlay.png"
        mask_path = out / f"{stem}_mask.png"
        Image.fromarray(over).save(over_path)
        Image.fromarray(binary).save(mask_path)
        written += [over_path, mask_path]
    return written
