"""Synthetic moving-rectangle sequences with pixel-exact ground truth.

A sequence is rendered on a canvas padded by the jitter amplitude; each
emitted frame crops a jittered window, so camera shake moves image and mask
together and the visible object footprint stays a simple clipped-rectangle
intersection that tests can recompute from the manifest geometry alone.

Knobs mirror the dataset challenges they stand in for: ``frame_skip`` keeps
every k-th base frame (low frame rate), ``lighting_amplitude`` drives a slow
sinusoidal brightness drift, ``jitter_amplitude`` bounds the per-frame
integer camera shift.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import ConfigurationError


@dataclass
class SynthSpec:
    resolution: int = 64
    frame_count: int = 8                      # base frames before skipping
    object_count: tuple[int, int] = (1, 1)    # inclusive range
    object_size: tuple[int, int] = (12, 20)   # side length range, pixels
    object_speed: tuple[int, int] = (1, 3)    # |velocity| range per axis, px/frame
    background_seed: int = 0
    lighting_amplitude: float = 0.0           # brightness factor swing
    frame_skip: int = 1
    jitter_amplitude: int = 0

    def validate(self):
        if self.resolution % 8 != 0 or self.resolution <= 0:
            raise ConfigurationError(
                f"resolution must be a positive multiple of 8, got {self.resolution}")
        if self.frame_count < 1:
            raise ConfigurationError("frame_count must be >= 1")
        if self.frame_skip < 1:
            raise ConfigurationError("frame_skip must be >= 1")
        if self.jitter_amplitude < 0 or self.lighting_amplitude < 0:
            raise ConfigurationError("amplitudes must be non-negative")


def _smooth_texture(rng: np.random.Generator, size: int) -> np.ndarray:
    """Static background: coarse seeded noise upsampled to full resolution."""
    coarse = rng.uniform(0.25, 0.75, size=(max(size // 8, 2), max(size // 8, 2), 3))
    im = Image.fromarray((coarse * 255).astype(np.uint8))
    im = im.resize((size, size), Image.BILINEAR)
    return np.asarray(im, dtype=np.float32) / 255.0


@dataclass
class _Object:
    x: int
    y: int
    w: int
    h: int
    vx: int
    vy: int
    color: np.ndarray = field(default=None)

    def at(self, t: int) -> tuple[int, int]:
        return self.x + self.vx * t, self.y + self.vy * t


def _spawn_objects(rng: np.random.Generator, spec: SynthSpec) -> list[_Object]:
    count = int(rng.integers(spec.object_count[0], spec.object_count[1] + 1))
    objs = []
    for _ in range(count):
        w = int(rng.integers(spec.object_size[0], spec.object_size[1] + 1))
        h = int(rng.integers(spec.object_size[0], spec.object_size[1] + 1))
        x = int(rng.integers(0, max(spec.resolution - w, 1)))
        y = int(rng.integers(0, max(spec.resolution - h, 1)))
        speed = lambda: int(rng.integers(spec.object_speed[0], spec.object_speed[1] + 1)) \
            * (1 if rng.random() < 0.5 else -1)
        color = rng.uniform(0.0, 1.0, size=3).astype(np.float32)
        objs.append(_Object(x=x, y=y, w=w, h=h, vx=speed(), vy=speed(), color=color))
    return objs


def synth_generate(spec: SynthSpec, seed: int, out_path) -> Path:
    """Write a deterministic sequence (input/, groundtruth/, manifest.jsonl).

    Returns the sequence directory.  Same spec and seed reproduce the exact
    same bytes.
    """
    spec.validate()
    out = Path(out_path)
    (out / "input").mkdir(parents=True, exist_ok=True)
    (out / "groundtruth").mkdir(parents=True, exist_ok=True)

    size, jit = spec.resolution, spec.jitter_amplitude
    canvas_size = size + 2 * jit
    bg_rng = np.random.default_rng(spec.background_seed)
    background = _smooth_texture(bg_rng, canvas_size)

    rng = np.random.default_rng(seed)
    objects = _spawn_objects(rng, spec)

    base_ids = range(0, spec.frame_count, spec.frame_skip)
    records = []
    for emit_idx, t in enumerate(base_ids, start=1):
        dx = int(rng.integers(-jit, jit + 1)) if jit > 0 else 0
        dy = int(rng.integers(-jit, jit + 1)) if jit > 0 else 0

        canvas = background.copy()
        mask_canvas = np.zeros((canvas_size, canvas_size), dtype=bool)
        frame_objects = []
        for obj in objects:
            ox, oy = obj.at(t)
            # canvas coords carry the jitter margin offset
            r0, r1 = oy + jit, oy + jit + obj.h
            c0, c1 = ox + jit, ox + jit + obj.w
            r0c, r1c = max(r0, 0), min(r1, canvas_size)
            c0c, c1c = max(c0, 0), min(c1, canvas_size)
            if r0c < r1c and c0c < c1c:
                canvas[r0c:r1c, c0c:c1c] = obj.color
                mask_canvas[r0c:r1c, c0c:c1c] = True
            frame_objects.append({"x": ox, "y": oy, "w": obj.w, "h": obj.h})

        window = canvas[jit + dy: jit + dy + size, jit + dx: jit + dx + size]
        mask = mask_canvas[jit + dy: jit + dy + size, jit + dx: jit + dx + size]

        brightness = 1.0
        if spec.lighting_amplitude > 0:
            brightness = 1.0 + spec.lighting_amplitude * float(
                np.sin(2.0 * np.pi * emit_idx / max(len(base_ids), 1)))
        frame = np.clip(window * brightness, 0.0, 1.0)

        image_name = f"input/in{emit_idx:06d}.png"
        mask_name = f"groundtruth/gt{emit_idx:06d}.png"
        Image.fromarray((frame * 255).astype(np.uint8)).save(out / image_name)
        Image.fromarray(np.where(mask, 255, 0).astype(np.uint8)).save(out / mask_name)
        records.append({
            "frame": emit_idx, "base_frame": t,
            "image": image_name, "mask": mask_name,
            "objects": frame_objects, "shift": [dx, dy],
            "brightness": round(brightness, 6),
        })

    with open(out / "manifest.jsonl", "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return out


def visible_rect(obj: dict, shift: tuple[int, int], size: int):
    """Clipped on-screen footprint of a manifest object; None if off-frame.

    This is the geometry oracle used by tests: emitted coords = scene coords
    minus the camera shift.
    """
    dx, dy = shift
    c0, c1 = obj["x"] - dx, obj["x"] - dx + obj["w"]
    r0, r1 = obj["y"] - dy, obj["y"] - dy + obj["h"]
    r0, c0 = max(r0, 0), max(c0, 0)
    r1, c1 = min(r1, size), min(c1, size)
    if r0 >= r1 or c0 >= c1:
        return None
    return r0, r1, c0, c1
