"""Dataset directory scanners and frame loading.

Supported layouts (see README for worked examples):

* ``cdnet2014``:   root/<category>/<video>/{input/in*.jpg, groundtruth/gt*.png,
  temporalROI.txt}.  The temporal ROI (two integers, inclusive) bounds the
  evaluation range.
* ``sbi2015``:     root/<video>/{input/*, groundtruth/*}; each video doubles
  as its own category so tables list one row per video.
* ``cityscapes``:  an image tree and an annotation tree paired by filename
  stem (``_leftImg8bit`` and ``_gt*_labelIds`` suffixes are stripped).
* ``synthetic``:   root/<video>/manifest.jsonl written by
  :func:`fgseglab.data.synth.synth_generate`.
"""

from __future__ import annotations

import json
import logging
import os
import re
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import DataError, EvaluationError, ScanError
from .types import (
    BG, FG, IGNORE,
    CDNET_LABEL_MAP, CITYSCAPES_CLASS_GROUPS, CITYSCAPES_IGNORE_IDS,
    FramePair, FrameRef, SequenceIndex, SourceId, VideoIndex,
)

log = logging.getLogger(__name__)

IMAGE_EXTS = (".png", ".jpg", ".jpeg", ".bmp")

_DIGITS = re.compile(r"(\d+)")


def _frame_number(path: str) -> int | None:
    m = _DIGITS.findall(Path(path).stem)
    return int(m[-1]) if m else None


def _list_images(directory: Path) -> list[Path]:
    return sorted(p for p in directory.iterdir()
                  if p.suffix.lower() in IMAGE_EXTS)


def _pair_by_number(video_name: str, input_dir: Path, gt_dir: Path) -> list[FrameRef]:
    """Match input and ground-truth files by the trailing number in their stems."""
    gt_by_num = {}
    for p in _list_images(gt_dir):
        n = _frame_number(str(p))
        if n is not None:
            gt_by_num[n] = p
    frames = []
    for p in _list_images(input_dir):
        n = _frame_number(str(p))
        if n is not None and n in gt_by_num:
            frames.append(FrameRef(frame=n, image_path=str(p),
                                   mask_path=str(gt_by_num[n])))
    if not frames:
        raise ScanError(f"video {video_name!r}: no pairable input/groundtruth frames")
    return frames


def _scan_cdnet_video(category: str, video_dir: Path) -> VideoIndex:
    name = video_dir.name
    input_dir = video_dir / "input"
    gt_dir = video_dir / "groundtruth"
    if not gt_dir.is_dir():
        raise ScanError(f"video {category}/{name}: missing groundtruth/ directory")
    if not input_dir.is_dir():
        raise ScanError(f"video {category}/{name}: missing input/ directory")
    frames = _pair_by_number(f"{category}/{name}", input_dir, gt_dir)
    eval_range = None
    roi_file = video_dir / "temporalROI.txt"
    if roi_file.is_file():
        parts = roi_file.read_text().split()
        if len(parts) < 2:
            raise ScanError(f"video {category}/{name}: malformed temporalROI.txt")
        eval_range = (int(parts[0]), int(parts[1]))
    return VideoIndex(category=category, name=name, frames=frames,
                      eval_range=eval_range)


def _scan_cdnet(root: Path) -> list[VideoIndex]:
    videos = []
    for cat_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        for video_dir in sorted(p for p in cat_dir.iterdir() if p.is_dir()):
            videos.append(_scan_cdnet_video(cat_dir.name, video_dir))
    return videos


def _scan_sbi(root: Path) -> list[VideoIndex]:
    videos = []
    for video_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        v = _scan_cdnet_video(video_dir.name, video_dir)
        videos.append(v)
    return videos


_CITYSCAPES_IMAGE_DIRS = ("leftImg8bit", "images")
_CITYSCAPES_LABEL_DIRS = ("gtFine", "gtCoarse", "labels", "annotations")
_IMAGE_SUFFIX = re.compile(r"_leftImg8bit$")
_LABEL_SUFFIX = re.compile(r"_gt(Fine|Coarse)_labelIds$")


def _scan_cityscapes(root: Path) -> list[VideoIndex]:
    image_root = next((root / d for d in _CITYSCAPES_IMAGE_DIRS
                       if (root / d).is_dir()), None)
    label_root = next((root / d for d in _CITYSCAPES_LABEL_DIRS
                       if (root / d).is_dir()), None)
    if image_root is None or label_root is None:
        raise ScanError(
            f"cityscapes root {root} needs an image tree "
            f"({'/'.join(_CITYSCAPES_IMAGE_DIRS)}) and an annotation tree "
            f"({'/'.join(_CITYSCAPES_LABEL_DIRS)})")

    labels_by_stem = {}
    for p in sorted(label_root.rglob("*")):
        if p.suffix.lower() in IMAGE_EXTS:
            labels_by_stem[_LABEL_SUFFIX.sub("", p.stem)] = p

    by_group: dict[tuple[str, str], list[FrameRef]] = {}
    for p in sorted(image_root.rglob("*")):
        if p.suffix.lower() not in IMAGE_EXTS:
            continue
        stem = _IMAGE_SUFFIX.sub("", p.stem)
        label = labels_by_stem.get(stem)
        if label is None:
            continue
        rel = p.relative_to(image_root).parts
        category = rel[0] if len(rel) > 2 else "cityscapes"
        video = rel[-2] if len(rel) > 1 else "all"
        by_group.setdefault((category, video), []).append(
            FrameRef(frame=0, image_path=str(p), mask_path=str(label)))

    videos = []
    for (category, video), frames in sorted(by_group.items()):
        frames = [FrameRef(frame=i + 1, image_path=f.image_path, mask_path=f.mask_path)
                  for i, f in enumerate(frames)]
        videos.append(VideoIndex(category=category, name=video, frames=frames))
    if not videos:
        raise ScanError(f"cityscapes root {root}: no image/annotation pairs found")
    return videos


def _scan_synthetic(root: Path) -> list[VideoIndex]:
    manifest_paths = []
    if (root / "manifest.jsonl").is_file():
        manifest_paths.append(root / "manifest.jsonl")
    manifest_paths.extend(sorted(root.glob("*/manifest.jsonl")))
    if not manifest_paths:
        raise ScanError(f"synthetic root {root}: no manifest.jsonl found")
    videos = []
    for mpath in manifest_paths:
        base = mpath.parent
        frames, meta = [], {}
        for line in mpath.read_text().splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            frames.append(FrameRef(frame=int(rec["frame"]),
                                   image_path=str(base / rec["image"]),
                                   mask_path=str(base / rec["mask"])))
            meta[int(rec["frame"])] = rec
        if not frames:
            raise ScanError(f"video {base.name!r}: empty manifest")
        videos.append(VideoIndex(category="synthetic", name=base.name,
                                 frames=frames, meta=meta))
    return videos


_SCANNERS = {
    "cdnet2014": _scan_cdnet,
    "sbi2015": _scan_sbi,
    "cityscapes": _scan_cityscapes,
    "synthetic": _scan_synthetic,
}


def scan(root, kind: str) -> SequenceIndex:
    """Index a dataset root into videos of pairable frames."""
    root = Path(root)
    if kind not in _SCANNERS:
        raise ScanError(f"unknown dataset kind {kind!r}; "
                        f"expected one of {sorted(_SCANNERS)}")
    if not root.is_dir():
        raise ScanError(f"dataset root {root} does not exist")
    videos = _SCANNERS[kind](root)
    if not videos:
        raise ScanError(f"dataset root {root}: no videos found")
    return SequenceIndex(kind=kind, root=str(root), videos=videos)


def _read_image(path: str, target_size: int) -> np.ndarray:
    try:
        with Image.open(path) as im:
            im = im.convert("RGB")
            if im.size != (target_size, target_size):
                im = im.resize((target_size, target_size), Image.BILINEAR)
            arr = np.asarray(im, dtype=np.float32) / 255.0
    except OSError as e:
        raise OSError(f"failed to read image {path}: {e}") from e
    return arr


def _read_mask_raw(path: str, target_size: int) -> np.ndarray:
    try:
        with Image.open(path) as im:
            im = im.convert("L")
            if im.size != (target_size, target_size):
                im = im.resize((target_size, target_size), Image.NEAREST)
            arr = np.asarray(im)
    except OSError as e:
        raise OSError(f"failed to read mask {path}: {e}") from e
    return arr


def _map_gray_labels(raw: np.ndarray, path: str) -> np.ndarray:
    mask = np.full(raw.shape, IGNORE, dtype=np.int8)
    known = np.zeros(raw.shape, dtype=bool)
    for value, code in CDNET_LABEL_MAP.items():
        hit = raw == value
        mask[hit] = code
        known |= hit
    if not known.all():
        bad = np.unique(raw[~known])
        raise DataError(f"mask {path}: unknown label values {bad.tolist()}")
    return mask


def _map_cityscapes_labels(raw: np.ndarray, fg_ids: frozenset[int]) -> np.ndarray:
    mask = np.full(raw.shape, BG, dtype=np.int8)
    mask[np.isin(raw, list(fg_ids))] = FG
    mask[np.isin(raw, list(CITYSCAPES_IGNORE_IDS))] = IGNORE
    return mask


def resolve_cityscapes_classes(classes) -> frozenset[int]:
    """Accept a group name ('road', 'citizens', 'traffic_signs') or id set."""
    if isinstance(classes, str):
        try:
            return CITYSCAPES_CLASS_GROUPS[classes]
        except KeyError:
            raise DataError(
                f"unknown cityscapes class group {classes!r}; "
                f"known: {sorted(CITYSCAPES_CLASS_GROUPS)}") from None
    return frozenset(int(c) for c in classes)


def load_pair(index: SequenceIndex, video: VideoIndex, frame,
              target_size: int, cityscapes_classes="road") -> FramePair:
    """Load one frame as a normalized image plus ternary mask.

    ``frame`` is a frame id or a FrameRef from the video.  Images are
    resampled bilinearly, masks nearest-neighbour (no new label values).
    """
    if isinstance(frame, FrameRef):
        ref = frame
    else:
        matches = [f for f in video.frames if f.frame == int(frame)]
        if not matches:
            raise DataError(f"frame {frame} not in video {video.category}/{video.name}")
        ref = matches[0]

    image = _read_image(ref.image_path, target_size)
    raw = _read_mask_raw(ref.mask_path, target_size)
    if index.kind == "cityscapes":
        mask = _map_cityscapes_labels(raw, resolve_cityscapes_classes(cityscapes_classes))
    else:
        mask = _map_gray_labels(raw, ref.mask_path)
    source = SourceId(dataset=index.kind, category=video.category,
                      video=video.name, frame=ref.frame)
    return FramePair(image=image, mask=mask, source=source)


def select_frames(video: VideoIndex, n: int, seed: int) -> list[int]:
    """Sample ``n`` distinct frame ids uniformly from the evaluation range.

    Returns a sorted list; if fewer than ``n`` frames exist, all of them
    are returned with a warning.
    """
    if n < 1:
        raise EvaluationError(f"frame selection needs n >= 1, got {n}")
    candidates = [f.frame for f in video.eval_frames()]
    if not candidates:
        raise EvaluationError(
            f"video {video.category}/{video.name}: empty evaluation range")
    if n >= len(candidates):
        if n > len(candidates):
            log.warning("video %s/%s: requested %d frames, only %d available",
                        video.category, video.name, n, len(candidates))
        return sorted(candidates)
    rng = np.random.default_rng(seed)
    picked = rng.choice(len(candidates), size=n, replace=False)
    return sorted(candidates[i] for i in picked)
