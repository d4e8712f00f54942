"""Experiment specs and the seeded train/evaluate/persist cycle.

One experiment trains a single model on the union of the selected training
frames of every selected video, then scores each video on its held-out
ground-truthed frames (everything in the evaluation range that was not used
for training).  Failures (bad dataset root, NaN loss, empty evaluation sets)
do not raise: they come back as a failed result row with diagnostics so a
grid can keep going.
"""

from __future__ import annotations

import json
import logging
import os
import time
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..data.sources import load_pair, scan, select_frames
from ..data.types import FG, FramePair, SequenceIndex, VideoIndex
from ..errors import (ConfigurationError, EvaluationError, FgSegLabError,
                      TrainingDivergedError)
from ..metrics import MetricsReport, aggregate, auc as auc_of, confusion, derive, \
    miou_from_counts
from ..model.builder import build_model
from ..model.config import ModelConfig
from ..model.executor import predict
from ..model.params import apply_pretrained_and_freeze, init_params
from ..train.loop import TrainHistory, train
from ..train.schedule import TrainSchedule
from .checkpoint import load_checkpoint, save_checkpoint

log = logging.getLogger(__name__)

DATA_ROOT_ENV = "FGSEGLAB_DATA_ROOT"
METRIC_SCHEMES = ("mean_of_videos", "pooled_counts")


@dataclass
class DatasetSelector:
    kind: str = "synthetic"
    root: str = "."
    categories: list[str] | None = None
    videos: list[str] | None = None          # "category/name" entries
    frames_per_video: int = 200
    seed: int = 0
    cityscapes_classes: str | list = "road"

    def resolve_root(self) -> Path:
        root = Path(self.root)
        env = os.environ.get(DATA_ROOT_ENV)
        if env and not root.is_absolute():
            return Path(env) / root
        return root

    def to_dict(self) -> dict:
        d = dict(vars(self))
        if isinstance(d["cityscapes_classes"], (set, frozenset)):
            d["cityscapes_classes"] = sorted(d["cityscapes_classes"])
        return d


@dataclass
class ExperimentSpec:
    name: str
    model: ModelConfig
    schedule: TrainSchedule
    dataset: DatasetSelector
    metric_scheme: str = "mean_of_videos"
    pretrained_bundle: str | None = None
    preset: str | None = None                # provenance only

    def validate(self):
        if not self.name:
            raise ConfigurationError("experiment name must be non-empty")
        if self.metric_scheme not in METRIC_SCHEMES:
            raise ConfigurationError(
                f"metric_scheme must be one of {METRIC_SCHEMES}, "
                f"got {self.metric_scheme!r}")
        self.model.validate()
        self.schedule.validate()

    def to_dict(self) -> dict:
        return {"name": self.name, "preset": self.preset,
                "model": self.model.to_dict(),
                "schedule": self.schedule.to_dict(),
                "dataset": self.dataset.to_dict(),
                "metric_scheme": self.metric_scheme,
                "pretrained_bundle": self.pretrained_bundle}


@dataclass
class ExperimentResult:
    name: str
    status: str = "ok"                      # ok | failed
    error: str | None = None
    per_video: dict[str, MetricsReport] = field(default_factory=dict)
    per_category: dict[str, MetricsReport] = field(default_factory=dict)
    metric_scheme: str = "mean_of_videos"
    history: dict | None = None
    checkpoint_path: str | None = None
    selections: dict[str, list[int]] = field(default_factory=dict)
    wall_time: float = 0.0
    seed: int = 0


def _video_key(video: VideoIndex) -> str:
    return f"{video.category}/{video.name}"


def _video_seed(base: int, video: VideoIndex) -> int:
    return int(np.random.SeedSequence(
        [base, zlib.crc32(_video_key(video).encode())]).generate_state(1)[0])


def select_videos(index: SequenceIndex, selector: DatasetSelector) -> list[VideoIndex]:
    videos = index.videos
    if selector.categories:
        want = set(selector.categories)
        videos = [v for v in videos if v.category in want]
    if selector.videos:
        want = set(selector.videos)
        videos = [v for v in videos if _video_key(v) in want or v.name in want]
    if not videos:
        raise EvaluationError("dataset selector matched no videos")
    return videos


def _load_frames(index, video, frame_ids, size, selector) -> list[FramePair]:
    refs = {f.frame: f for f in video.frames}
    return [load_pair(index, video, refs[i], size,
                      cityscapes_classes=selector.cityscapes_classes)
            for i in frame_ids]


def split_train_val(pairs: list[FramePair], seed: int, val_fraction=0.2):
    """Seeded 80/20 split, stratified by foreground presence.

    Frames too few to split (a stratum of one, or fewer than two frames in
    total) stay in the training set; the validation set then falls back to
    the last frame so both sides are always non-empty.
    """
    if len(pairs) < 2:
        return list(pairs), list(pairs)
    rng = np.random.default_rng(seed)
    with_fg = [i for i, p in enumerate(pairs) if (p.mask == FG).any()]
    without = [i for i, p in enumerate(pairs) if not (p.mask == FG).any()]
    val_idx: set[int] = set()
    for group in (with_fg, without):
        if len(group) < 2:
            continue
        k = min(max(1, round(len(group) * val_fraction)), len(group) - 1)
        picked = rng.choice(len(group), size=k, replace=False)
        val_idx.update(group[i] for i in picked)
    if not val_idx:
        val_idx = {len(pairs) - 1}
    train_pairs = [p for i, p in enumerate(pairs) if i not in val_idx]
    val_pairs = [p for i, p in enumerate(pairs) if i in val_idx]
    return train_pairs, val_pairs


def score_video(graph, pset, pairs: list[FramePair]) -> MetricsReport:
    """Pooled confusion counts over frames, AUC averaged per frame."""
    if not pairs:
        raise EvaluationError("no evaluation frames")
    counts = None
    aucs = []
    for pair in pairs:
        probs = predict(graph, pset, pair.image[None])[0, :, :, 0]
        pred = probs >= 0.5
        c = confusion(pred, pair.mask)
        counts = c if counts is None else counts + c
        a = auc_of(probs, pair.mask)
        if a is not None:
            aucs.append(a)
    mean_auc = float(np.mean(aucs)) if aucs else None
    return derive(counts, auc=mean_auc, iou=miou_from_counts(counts)[:2])


def evaluate_on_index(graph, pset, index, selector, selections,
                      scheme="mean_of_videos"):
    """Score held-out frames of every selected video; returns
    (per_video, per_category) report dicts."""
    per_video: dict[str, MetricsReport] = {}
    for video in select_videos(index, selector):
        key = _video_key(video)
        held_out = [f.frame for f in video.eval_frames()
                    if f.frame not in set(selections.get(key, ()))]
        if not held_out:
            raise EvaluationError(
                f"video {key}: no ground-truthed frames left for evaluation "
                "(all selected for training)")
        pairs = _load_frames(index, video, held_out, graph.input_size, selector)
        per_video[key] = score_video(graph, pset, pairs)

    per_category: dict[str, MetricsReport] = {}
    by_cat: dict[str, list[MetricsReport]] = {}
    for key, report in per_video.items():
        by_cat.setdefault(key.split("/", 1)[0], []).append(report)
    for cat, reports in sorted(by_cat.items()):
        per_category[cat] = aggregate(reports, scheme)
    return per_video, per_category


def run(spec: ExperimentSpec, out_dir) -> ExperimentResult:
    """Train, evaluate and persist one grid cell."""
    t0 = time.perf_counter()
    result = ExperimentResult(name=spec.name, seed=spec.schedule.seed,
                              metric_scheme=spec.metric_scheme)
    exp_dir = Path(out_dir) / spec.name
    exp_dir.mkdir(parents=True, exist_ok=True)
    try:
        spec.validate()
        index = scan(spec.dataset.resolve_root(), spec.dataset.kind)
        videos = select_videos(index, spec.dataset)

        train_pairs: list[FramePair] = []
        for video in videos:
            ids = select_frames(video, spec.dataset.frames_per_video,
                                _video_seed(spec.dataset.seed, video))
            result.selections[_video_key(video)] = ids
            train_pairs.extend(_load_frames(index, video, ids,
                                            spec.model.input_size, spec.dataset))

        graph = build_model(spec.model)
        pset = init_params(graph, seed=spec.schedule.seed)
        pset = apply_pretrained_and_freeze(pset, graph,
                                           bundle_dir=spec.pretrained_bundle)
        tr, val = split_train_val(train_pairs, spec.schedule.seed)
        best, history = train(graph, pset, tr, val, spec.schedule)

        ckpt_dir = exp_dir / "checkpoint"
        save_checkpoint(best, spec.model, ckpt_dir,
                        best_epoch=history.best_epoch,
                        val_loss=history.best_val_loss)
        result.checkpoint_path = str(ckpt_dir)
        result.history = {"epochs": len(history.records),
                          "stop_reason": history.stop_reason,
                          "best_epoch": history.best_epoch,
                          "best_val_loss": history.best_val_loss}
        (exp_dir / "history.json").write_text(json.dumps(history.to_dict(), indent=1))

        result.per_video, result.per_category = evaluate_on_index(
            graph, best, index, spec.dataset, result.selections,
            spec.metric_scheme)
    except (FgSegLabError, OSError) as e:
        result.status = "failed"
        result.error = f"{type(e).__name__}: {e}"
        if isinstance(e, TrainingDivergedError):
            result.error += f" (epoch={e.epoch} batch={e.batch} lr={e.lr})"
        log.warning("experiment %s failed: %s", spec.name, result.error)

    result.wall_time = time.perf_counter() - t0
    _persist_result(result, spec, exp_dir)
    return result


def reevaluate(checkpoint_path, selector: DatasetSelector,
               selections: dict[str, list[int]] | None = None,
               scheme="mean_of_videos"):
    """Recompute metric rows from a checkpoint and recorded selections."""
    ckpt = load_checkpoint(checkpoint_path)
    graph = build_model(ckpt.config)
    index = scan(selector.resolve_root(), selector.kind)
    return evaluate_on_index(graph, ckpt.params, index, selector,
                             selections or {}, scheme)


def _report_dict(report: MetricsReport) -> dict:
    d = {k: getattr(report, k) for k in
         ("fpr", "fnr", "recall", "precision", "pwc", "f_measure", "mcc",
          "iou_fg", "iou_bg", "miou", "auc", "specificity")}
    if report.counts is not None:
        d["counts"] = vars(report.counts)
    return d


def _persist_result(result: ExperimentResult, spec: ExperimentSpec, exp_dir: Path):
    payload = {
        "name": result.name, "status": result.status, "error": result.error,
        "seed": result.seed, "wall_time": result.wall_time,
        "metric_scheme": result.metric_scheme,
        "checkpoint": result.checkpoint_path,
        "history": result.history,
        "selections": result.selections,
        "per_video": {k: _report_dict(r) for k, r in result.per_video.items()},
        "per_category": {k: _report_dict(r) for k, r in result.per_category.items()},
        "spec": spec.to_dict(),
    }
    (exp_dir / "result.json").write_text(json.dumps(payload, indent=1, sort_keys=True))


def load_result(exp_dir) -> ExperimentResult:
    """Rehydrate a persisted result row (metrics only, no checkpoint load)."""
    payload = json.loads((Path(exp_dir) / "result.json").read_text())

    def to_report(d):
        counts = d.pop("counts", None)
        from ..metrics import ConfusionCounts
        report = MetricsReport(**{k: v for k, v in d.items()
                                  if k in MetricsReport.__dataclass_fields__})
        if counts is not None:
            report = MetricsReport(**{**vars(report), "counts": ConfusionCounts(**counts)})
        return report

    return ExperimentResult(
        name=payload["name"], status=payload["status"], error=payload["error"],
        per_video={k: to_report(dict(v)) for k, v in payload["per_video"].items()},
        per_category={k: to_report(dict(v)) for k, v in payload["per_category"].items()},
        metric_scheme=payload.get("metric_scheme", "mean_of_videos"),
        history=payload.get("history"),
        checkpoint_path=payload.get("checkpoint"),
        selections={k: list(v) for k, v in payload.get("selections", {}).items()},
        wall_time=payload.get("wall_time", 0.0), seed=payload.get("seed", 0),
    )
