"""Core data records: frame pairs, sequence indices, label codes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Internal ternary label codes (int8 masks).
FG = 1
BG = 0
IGNORE = -1

# CDNet2014 ground-truth gray levels -> internal codes.  Shadow (50) counts
# as background; unknown motion (170) and outside-ROI (85) are ignored.
CDNET_LABEL_MAP = {255: FG, 0: BG, 50: BG, 85: IGNORE, 170: IGNORE}

# CityScapes labelIds folded into named foreground groups.  "citizens" is
# person + rider.  Ids 0-3 (unlabeled, ego vehicle, rectification border,
# out of roi) are ignored; everything else is background.
CITYSCAPES_CLASS_GROUPS = {
    "road": frozenset({7}),
    "citizens": frozenset({24, 25}),
    "traffic_signs": frozenset({20}),
}
CITYSCAPES_IGNORE_IDS = frozenset({0, 1, 2, 3})


@dataclass(frozen=True)
class SourceId:
    """Where a frame came from: dataset/category/video/frame index."""

    dataset: str
    category: str
    video: str
    frame: int

    def stem(self) -> str:
        return f"{self.dataset}_{self.category}_{self.video}_{self.frame:06d}"


@dataclass
class FramePair:
    """A normalized input image with its ternary label mask."""

    image: np.ndarray       # H x W x 3 float32 in [0, 1]
    mask: np.ndarray        # H x W int8 in {FG, BG, IGNORE}
    source: SourceId

    def __post_init__(self):
        if self.image.ndim != 3 or self.image.shape[2] != 3:
            raise ValueError(f"image must be HxWx3, got {self.image.shape}")
        if self.mask.shape != self.image.shape[:2]:
            raise ValueError(
                f"mask shape {self.mask.shape} != image shape {self.image.shape[:2]}")


@dataclass(frozen=True)
class FrameRef:
    """Paths of one pairable frame inside a video."""

    frame: int
    image_path: str
    mask_path: str


@dataclass
class VideoIndex:
    """One video of a scanned dataset."""

    category: str
    name: str
    frames: list[FrameRef]
    # Inclusive frame-id range inside which evaluation is defined (CDNet
    # temporal ROI); None means every indexed frame counts.
    eval_range: tuple[int, int] | None = None
    resolution: tuple[int, int] | None = None   # (height, width) if known
    # Extra per-frame payload (synthetic object geometry, class sets, ...).
    meta: dict = field(default_factory=dict)

    def eval_frames(self) -> list[FrameRef]:
        if self.eval_range is None:
            return list(self.frames)
        lo, hi = self.eval_range
        return [f for f in self.frames if lo <= f.frame <= hi]


@dataclass
class SequenceIndex:
    """Scanned view of a dataset root."""

    kind: str
    root: str
    videos: list[VideoIndex]

    def video(self, category: str, name: str) -> VideoIndex:
        for v in self.videos:
            if v.category == category and v.name == name:
                return v
        raise KeyError(f"no video {category}/{name} in index")
