from .types import (
    BG, FG, IGNORE,
    CDNET_LABEL_MAP, CITYSCAPES_CLASS_GROUPS, CITYSCAPES_IGNORE_IDS,
    FramePair, FrameRef, SequenceIndex, SourceId, VideoIndex,
)
from .sources import load_pair, scan, select_frames
from .synth import SynthSpec, synth_generate

__all__ = [
    "BG", "FG", "IGNORE",
    "CDNET_LABEL_MAP", "CITYSCAPES_CLASS_GROUPS", "CITYSCAPES_IGNORE_IDS",
    "FramePair", "FrameRef", "SequenceIndex", "SourceId", "VideoIndex",
    "load_pair", "scan", "select_frames", "SynthSpec", "synth_generate",
]
