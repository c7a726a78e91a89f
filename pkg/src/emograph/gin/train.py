"""Minibatch training loop."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .loss import combined_loss
from .model import GraphBatch, backward, forward_batch
from .optim import Adadelta

log = logging.getLogger(__name__)


class TrainingDiverged(RuntimeError):
    pass


@dataclass
class TrainConfig:
    batch_size: int = 16
    lr: float = 0.001
    weight_decay: float = 0.0004
    epochs: int = 30
    seed: int = 0
    rho: float = 0.9
    eps: float = 1e-6

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")


def loss_and_grads(model, batch, y_cat, y_cont, lc, mode="train"):
    """Forward + backward on one batch; returns ``(loss, grads)``."""
    cat, cont, cache = forward_batch(batch, model, mode, keep_cache=True)
    value, d_cat, d_cont = combined_loss(cat, cont, y_cat, y_cont, lc)
    return value, backward(cache, model, d_cat, d_cont)


def evaluate_loss(model, graphs, y_cat, y_cont, lc, batch_size=64):
    total = 0.0
    for start in range(0, len(graphs), batch_size):
        sl = slice(start, start + batch_size)
        cat, cont, _ = forward_batch(GraphBatch(graphs[sl]), model, "eval")
        value, _, _ = combined_loss(cat, cont, y_cat[sl], y_cont[sl], lc)
        total += value * len(graphs[sl])
    return total / len(graphs)


def _param_norms(model):
    return {k: float(np.linalg.norm(v)) for k, v in model.params.items()}


def train(graphs, y_cat, y_cont, model, tc, lc, val=None, optimizer=None, on_epoch=None):
    """Fit ``model`` in place.

    ``val`` is an optional ``(graphs, y_cat, y_cont)`` triple scored after every
    epoch. Returns ``(model, history, optimizer)`` where ``history`` holds one
    dict per epoch with ``epoch``, ``train_loss``, ``val_loss`` and ``val_mAP``.
    """
    from ..evaluation import mean_average_precision

    if not graphs:
        raise ValueError("training set is empty")
    y_cat = np.asarray(y_cat, dtype=np.float64)
    y_cont = np.asarray(y_cont, dtype=np.float64)
    if len(y_cat) != len(graphs) or len(y_cont) != len(graphs):
        raise ValueError("graphs and targets differ in length")

    opt = optimizer or Adadelta(tc.lr, tc.rho, tc.eps, tc.weight_decay)
    rng = np.random.default_rng(tc.seed)
    n = len(graphs)
    history = []
    for epoch in range(1, tc.epochs + 1):
        order = rng.permutation(n)
        running = 0.0
        for b, start in enumerate(range(0, n, tc.batch_size)):
            idx = order[start : start + tc.batch_size]
            batch = GraphBatch([graphs[i] for i in idx])
            value, grads = loss_and_grads(model, batch, y_cat[idx], y_cont[idx], lc, "train")
            if not np.isfinite(value):
                raise TrainingDiverged(
                    f"non-finite loss at epoch {epoch}, batch {b}; parameter norms: {_param_norms(model)}"
                )
            opt.step(model.params, grads)
            running += value * len(idx)
        row = {"epoch": epoch, "train_loss": running / n, "val_loss": float("nan"), "val_mAP": float("nan")}
        if val is not None:
            vg, vc, vv = val
            vc = np.asarray(vc, dtype=np.float64)
            row["val_loss"] = evaluate_loss(model, vg, vc, np.asarray(vv, dtype=np.float64), lc)
            scores = np.vstack([forward_batch(GraphBatch(vg[s : s + 64]), model, "eval")[0] for s in range(0, len(vg), 64)])
            row["val_mAP"] = mean_average_precision(scores, vc)
        history.append(row)
        log.debug("epoch %d train_loss %.6f", epoch, row["train_loss"])
        if on_epoch is not None:
            on_epoch(row)
    return model, history, opt
