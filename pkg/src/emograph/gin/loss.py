"""Weighted squared-error loss over both heads."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..constants import N_EMOTIONS


@dataclass
class LossConfig:
    lambda_cat: float = 1.0
    lambda_cont: float = 1.0
    c: float = 1.2
    category_prior: np.ndarray = field(default_factory=lambda: np.zeros(N_EMOTIONS))

    def __post_init__(self):
        self.category_prior = np.asarray(self.category_prior, dtype=np.float64)
        if self.lambda_cat < 0 or self.lambda_cont < 0:
            raise ValueError("loss weights must be non-negative")
        if np.any(np.log(self.c + self.category_prior) <= 0):
            raise ValueError(f"ln(c + p_i) must be positive for every category (c={self.c})")

    @property
    def category_weights(self):
        """``w_i = 1 / ln(c + p_i)``."""
        return 1.0 / np.log(self.c + self.category_prior)


def combined_loss(cat, cont, y_cat, y_cont, cfg):
    """Mean over the batch of ``lambda_cat * sum_i w_i (cat_i - y_i)^2 + lambda_cont * sum_j (cont_j - v_j)^2``.

    Returns ``(loss, d_cat, d_cont)`` where the gradients are w.r.t. ``cat`` and ``cont``.
    """
    cat, cont = np.atleast_2d(cat), np.atleast_2d(cont)
    y_cat, y_cont = np.atleast_2d(y_cat), np.atleast_2d(y_cont)
    n = cat.shape[0]
    w = cfg.category_weights
    r_cat = cat - y_cat
    r_cont = cont - y_cont
    per_sample = cfg.lambda_cat * (w * r_cat**2).sum(axis=1) + cfg.lambda_cont * (r_cont**2).sum(axis=1)
    d_cat = (2.0 * cfg.lambda_cat / n) * w * r_cat
    d_cont = (2.0 * cfg.lambda_cont / n) * r_cont
    return float(per_sample.mean()), d_cat, d_cont


def loss(pred, y_cat, y_cont, cfg):
    """Scalar loss of a single :class:`~emograph.gin.model.Prediction`."""
    value, _, _ = combined_loss(pred.cat, pred.cont, y_cat, y_cont, cfg)
    return value
