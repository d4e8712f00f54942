"""Pixel-level segmentation metrics over binary masks with ignore support.

Masks use the label codes from :mod:`fgseglab.data.types`: foreground 1,
background 0, ignore -1.  Ignored pixels never contribute to any count or
score.  Division conventions for degenerate denominators: ratio metrics fall
back to 0, except per-class IoU which is 1 when the class is absent from both
prediction and ground truth (vacuous agreement).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import rankdata

from .data.types import BG, FG, IGNORE
from .errors import DimensionError, EvaluationError

log = logging.getLogger(__name__)

# Column order used by every emitted table (AUC appended when available).
METRIC_COLUMNS = (
    "fpr", "fnr", "recall", "precision", "pwc", "f_measure", "mcc", "miou",
)


@dataclass(frozen=True)
class ConfusionCounts:
    """Pixel confusion counts; foreground is the positive class."""

    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            self.tp + other.tp, self.fp + other.fp,
            self.tn + other.tn, self.fn + other.fn,
        )


@dataclass(frozen=True)
class MetricsReport:
    """All derived scores for one frame, video or category.

    ``auc`` and the IoU fields stay ``None`` unless they were computed;
    ``counts`` is carried along so reports can be pooled later.
    """

    recall: float = 0.0
    precision: float = 0.0
    specificity: float = 0.0
    fpr: float = 0.0
    fnr: float = 0.0
    pwc: float = 0.0
    f_measure: float = 0.0
    mcc: float = 0.0
    iou_fg: float | None = None
    iou_bg: float | None = None
    miou: float | None = None
    auc: float | None = None
    counts: ConfusionCounts | None = None

    def row(self) -> list[float | None]:
        """Values in the canonical table column order (AUC last)."""
        vals = [getattr(self, c) for c in METRIC_COLUMNS]
        vals.append(self.auc)
        return vals


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def _as_binary(pred: np.ndarray) -> np.ndarray:
    pred = np.asarray(pred)
    if pred.dtype == bool:
        return pred
    return pred == FG


def confusion(pred, gt) -> ConfusionCounts:
    """Count TP/FP/TN/FN between a binary prediction and a label mask.

    ``pred`` is boolean or {0,1}-coded; ``gt`` uses {FG, BG, IGNORE}.
    Ignore pixels are excluded entirely.
    """
    pred = _as_binary(pred)
    gt = np.asarray(gt)
    if pred.shape != gt.shape:
        raise DimensionError(
            f"prediction shape {pred.shape} != ground truth shape {gt.shape}")
    valid = gt != IGNORE
    p = pred[valid]
    y = gt[valid] == FG
    tp = int(np.count_nonzero(p & y))
    fp = int(np.count_nonzero(p & ~y))
    fn = int(np.count_nonzero(~p & y))
    tn = int(np.count_nonzero(~p & ~y))
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def derive(counts: ConfusionCounts, auc: float | None = None,
           iou: tuple[float, float] | None = None) -> MetricsReport:
    """Derive all ratio metrics from confusion counts.

    ``auc`` and ``iou`` (a ``(iou_fg, iou_bg)`` pair) are attached verbatim
    when given; they are not computable from counts alone in general (AUC
    needs scores; IoU is, but the convention here keeps ``derive`` a pure
    count-to-ratio map and lets callers pass :func:`miou_from_counts`).
    """
    tp, fp, tn, fn = counts.tp, counts.fp, counts.tn, counts.fn
    total = counts.total
    if total <= 0:
        raise EvaluationError("cannot derive metrics from zero evaluated pixels")

    recall = _ratio(tp, tp + fn)
    precision = _ratio(tp, tp + fp)
    specificity = _ratio(tn, tn + fp)
    fnr = _ratio(fn, tp + fn)
    fpr = _ratio(fp, fp + tn)
    pwc = 100.0 * (fp + fn) / total
    f_measure = _ratio(2.0 * precision * recall, precision + recall)

    # Matthews correlation; exact integer intermediates avoid overflow noise.
    num = tp * tn - fp * fn
    den = (tp + fp) * (tp + fn) * (tn + fn) * (tn + fp)
    mcc = num / math.sqrt(den) if den > 0 else 0.0

    report = MetricsReport(
        recall=recall, precision=precision, specificity=specificity,
        fpr=fpr, fnr=fnr, pwc=pwc, f_measure=f_measure, mcc=mcc,
        counts=counts,
    )
    if iou is not None:
        iou_fg, iou_bg = iou
        report = replace(report, iou_fg=iou_fg, iou_bg=iou_bg,
                         miou=(iou_fg + iou_bg) / 2.0)
    if auc is not None:
        report = replace(report, auc=auc)
    return report


def miou_from_counts(counts: ConfusionCounts) -> tuple[float, float, float]:
    """Per-class IoU and their mean from confusion counts.

    A class absent from both masks has IoU 1 (vacuous agreement); absent
    from only one, 0.
    """
    tp, fp, tn, fn = counts.tp, counts.fp, counts.tn, counts.fn
    fg_union = tp + fp + fn
    bg_union = tn + fn + fp
    iou_fg = tp / fg_union if fg_union > 0 else 1.0
    iou_bg = tn / bg_union if bg_union > 0 else 1.0
    return iou_fg, iou_bg, (iou_fg + iou_bg) / 2.0


def miou(pred, gt) -> tuple[float, float, float]:
    """Mean intersection-over-union of the two classes; see miou_from_counts."""
    return miou_from_counts(confusion(pred, gt))


def auc(scores, gt) -> float | None:
    """Area under the ROC curve of per-pixel scores against a label mask.

    Computed as the Mann-Whitney statistic via average ranks (ties count
    half), O(n log n).  Returns ``None`` when either class is absent among
    the non-ignore pixels; such frames are excluded from aggregation.
    """
    scores = np.asarray(scores, dtype=np.float64)
    gt = np.asarray(gt)
    if scores.shape != gt.shape:
        raise DimensionError(
            f"score shape {scores.shape} != ground truth shape {gt.shape}")
    valid = gt != IGNORE
    s = scores[valid]
    y = gt[valid] == FG
    n_pos = int(np.count_nonzero(y))
    n_neg = s.size - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    ranks = rankdata(s)
    rank_sum_pos = float(ranks[y].sum())
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def aggregate(reports: list[MetricsReport], scheme: str = "mean_of_videos") -> MetricsReport:
    """Combine per-video reports into one.

    ``mean_of_videos`` is the unweighted arithmetic mean per metric (AUC
    averaged over the reports where it is defined).  ``pooled_counts`` sums
    the confusion counts and re-derives every ratio metric from the pool.
    """
    if not reports:
        raise EvaluationError("cannot aggregate an empty report list")
    if scheme == "mean_of_videos":
        def mean_of(field):
            vals = [getattr(r, field) for r in reports]
            if any(v is None for v in vals):
                vals = [v for v in vals if v is not None]
                if not vals:
                    return None
            return float(np.mean(vals))
        kwargs = {f: mean_of(f) for f in (
            "recall", "precision", "specificity", "fpr", "fnr", "pwc",
            "f_measure", "mcc", "iou_fg", "iou_bg", "miou", "auc")}
        return MetricsReport(**kwargs)
    if scheme == "pooled_counts":
        missing = [r for r in reports if r.counts is None]
        if missing:
            raise EvaluationError("pooled_counts needs counts on every report")
        pooled = reports[0].counts
        for r in reports[1:]:
            pooled = pooled + r.counts
        aucs = [r.auc for r in reports if r.auc is not None]
        pooled_auc = float(np.mean(aucs)) if aucs else None
        return derive(pooled, auc=pooled_auc, iou=miou_from_counts(pooled)[:2])
    raise EvaluationError(f"unknown aggregation scheme: {scheme!r}")


def frame_report(pred, gt, scores=None) -> MetricsReport:
    """Full report for one frame: counts, ratios, IoU and (optional) AUC."""
    counts = confusion(pred, gt)
    iou_fg, iou_bg, _ = miou_from_counts(counts)
    frame_auc = auc(scores, gt) if scores is not None else None
    return derive(counts, auc=frame_auc, iou=(iou_fg, iou_bg))
