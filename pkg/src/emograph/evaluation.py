"""Multi-label average precision and single-sample inference latency."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .constants import EMOTIONS, N_EMOTIONS


class UndefinedAP(ValueError):
    """Average precision requested for a category without positive samples."""


def average_precision(scores, labels):
    """Mean of the precision values at the rank of every positive sample.

    Ranking is by descending score; equal scores keep their input order.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError(f"scores and labels must be 1-d of equal length, got {scores.shape} and {labels.shape}")
    positives = int(np.count_nonzero(labels))
    if positives == 0:
        raise UndefinedAP("no positive labels")
    order = np.argsort(-scores, kind="stable")
    hits = labels[order] != 0
    tp = np.cumsum(hits)
    ranks = np.arange(1, len(hits) + 1)
    return float(np.sum(tp[hits] / ranks[hits]) / positives)


def mean_average_precision(scores, y_true):
    """mAP over the columns of ``y_true`` that contain at least one positive; NaN if none do."""
    scores = np.asarray(scores)
    y_true = np.asarray(y_true)
    aps = [average_precision(scores[:, j], y_true[:, j]) for j in range(y_true.shape[1]) if y_true[:, j].any()]
    return float(np.mean(aps)) if aps else float("nan")


@dataclass
class EvalReport:
    per_category_ap: list
    map: float
    n_samples: int
    degenerate_count: int
    excluded_categories: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)

    def table(self):
        lines = [f"{'category':<18}{'AP':>8}"]
        for name, ap in zip(EMOTIONS, self.per_category_ap):
            lines.append(f"{name:<18}{'-' if ap is None else f'{ap:.4f}':>8}")
        lines.append(f"{'mAP':<18}{self.map:>8.4f}")
        lines.append(f"samples {self.n_samples}, degenerate {self.degenerate_count}, "
                     f"excluded {len(self.excluded_categories)}")
        return "\n".join(lines)


def _indicator(targets):
    if isinstance(targets, np.ndarray) and targets.ndim == 2:
        return targets[:, :N_EMOTIONS] != 0
    y = np.zeros((len(targets), N_EMOTIONS), dtype=bool)
    for i, labels in enumerate(targets):
        y[i, sorted(labels)] = True
    return y


def evaluate(preds, targets):
    """Per-category AP and mAP.

    ``targets`` is either a ``(n, >=26)`` indicator array or a sequence of label-index sets.
    """
    if len(preds) == 0:
        raise ValueError("cannot evaluate zero predictions")
    if len(preds) != len(targets):
        raise ValueError(f"{len(preds)} predictions but {len(targets)} targets")
    scores = np.vstack([p.cat for p in preds])
    y = _indicator(targets)
    per_cat, excluded = [], []
    for j in range(N_EMOTIONS):
        if y[:, j].any():
            per_cat.append(average_precision(scores[:, j], y[:, j]))
        else:
            per_cat.append(None)
            excluded.append(EMOTIONS[j])
    valid = [a for a in per_cat if a is not None]
    return EvalReport(
        per_category_ap=per_cat,
        map=float(np.mean(valid)) if valid else float("nan"),
        n_samples=len(preds),
        degenerate_count=sum(bool(p.degenerate) for p in preds),
        excluded_categories=excluded,
    )


@dataclass
class LatencyReport:
    per_sample_ms: list
    min_ms: float
    mean_ms: float
    fps_min: float
    fps_mean: float

    @classmethod
    def from_samples(cls, per_sample_ms):
        ms = [float(x) for x in per_sample_ms]
        lo, mean = min(ms), float(np.mean(ms))
        return cls(ms, lo, mean, 1000.0 / lo, 1000.0 / mean)

    def to_dict(self):
        return asdict(self)

    def table(self):
        return (
            f"{'':<6}{'ms':>10}{'fps':>10}\n"
            f"{'min':<6}{self.min_ms:>10.4f}{self.fps_min:>10.1f}\n"
            f"{'mean':<6}{self.mean_ms:>10.4f}{self.fps_mean:>10.1f}\n"
            f"samples {len(self.per_sample_ms)}"
        )


def bench_inference(captions, predict_one, warmup=1, reps=3):
    """Time ``predict_one(caption)`` for every caption, one at a time.

    The caption list is traversed ``reps`` times; the first ``warmup``
    traversals are discarded.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if warmup >= reps:
        raise ValueError(f"warmup ({warmup}) must be smaller than reps ({reps})")
    if not captions:
        raise ValueError("no captions to benchmark")
    samples = []
    for rep in range(reps):
        for c in captions:
            t0 = time.perf_counter()
            predict_one(c)
            dt = (time.perf_counter() - t0) * 1000.0
            if rep >= warmup:
                samples.append(dt)
    return LatencyReport.from_samples(samples)
