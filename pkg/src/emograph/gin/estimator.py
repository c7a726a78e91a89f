"""scikit-learn compatible front end for the GIN classifier."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ..constants import EMBED_DIM, N_EMOTIONS, N_VAD
from ..validation import check_graphs, check_targets
from .loss import LossConfig
from .model import GinModel, GraphBatch, Prediction, forward_batch
from .train import TrainConfig, train

DEGENERATE_SCORE = 0.5


def degenerate_prediction(caption_id=None):
    return Prediction(np.full(N_EMOTIONS, DEGENERATE_SCORE), np.full(N_VAD, 0.5), True, caption_id)


class GINEmotionClassifier(ClassifierMixin, BaseEstimator):
    """Multi-label emotion classifier over :class:`~emograph.graph.ContextGraph` inputs.

    ``X`` is a sequence of graphs; ``None`` entries stand for captions that
    produced no graph and are skipped in ``fit`` and answered with a constant
    degenerate prediction. ``y`` is an ``(n, 29)`` array: 26 label indicators
    followed by normalized valence, arousal and dominance.

    After fitting, ``model_`` holds the :class:`GinModel`, ``history_`` the
    per-epoch losses and ``optimizer_`` the Adadelta state.
    """

    def __init__(
        self,
        hidden=64,
        d_read=64,
        n_layers=5,
        pooling="avg",
        readout_skip_h0=False,
        epochs=30,
        batch_size=16,
        lr=0.001,
        weight_decay=0.0004,
        rho=0.9,
        adadelta_eps=1e-6,
        lambda_cat=1.0,
        lambda_cont=1.0,
        c=1.2,
        category_prior=None,
        random_state=0,
    ):
        self.hidden = hidden
        self.d_read = d_read
        self.n_layers = n_layers
        self.pooling = pooling
        self.readout_skip_h0 = readout_skip_h0
        self.epochs = epochs
        self.batch_size = batch_size
        self.lr = lr
        self.weight_decay = weight_decay
        self.rho = rho
        self.adadelta_eps = adadelta_eps
        self.lambda_cat = lambda_cat
        self.lambda_cont = lambda_cont
        self.c = c
        self.category_prior = category_prior
        self.random_state = random_state

    def _train_config(self):
        return TrainConfig(
            batch_size=self.batch_size,
            lr=self.lr,
            weight_decay=self.weight_decay,
            epochs=self.epochs,
            seed=self.random_state,
            rho=self.rho,
            eps=self.adadelta_eps,
        )

    def _loss_config(self, y_cat):
        prior = y_cat.mean(axis=0) if self.category_prior is None else self.category_prior
        return LossConfig(self.lambda_cat, self.lambda_cont, self.c, prior)

    def fit(self, X, y, eval_set=None):
        X = check_graphs(X)
        y_cat, y_cont = check_targets(y, len(X))
        keep = [i for i, g in enumerate(X) if g is not None]
        if not keep:
            raise ValueError("no buildable graphs in training data")
        feature_dim = X[keep[0]].x.shape[1]
        check_graphs(X, feature_dim)
        self.loss_config_ = self._loss_config(y_cat)
        self.model_ = GinModel.initialize(
            self.random_state,
            input_dim=feature_dim,
            hidden=self.hidden,
            d_read=self.d_read,
            n_layers=self.n_layers,
            pooling=self.pooling,
            readout_skip_h0=self.readout_skip_h0,
        )
        val = None
        if eval_set is not None:
            vx, vy = eval_set
            vx = check_graphs(vx, feature_dim)
            vc, vv = check_targets(vy, len(vx))
            vk = [i for i, g in enumerate(vx) if g is not None]
            val = ([vx[i] for i in vk], vc[vk], vv[vk])
        _, self.history_, self.optimizer_ = train(
            [X[i] for i in keep], y_cat[keep], y_cont[keep], self.model_, self._train_config(), self.loss_config_, val
        )
        self.classes_ = np.arange(N_EMOTIONS)
        self.n_features_in_ = feature_dim
        return self

    def predict_full(self, X, batch_size=64):
        """One :class:`Prediction` per sample, degenerate for ``None`` graphs."""
        check_is_fitted(self, "model_")
        X = check_graphs(X, self.n_features_in_ if hasattr(self, "n_features_in_") else EMBED_DIM)
        out = [None] * len(X)
        live = [i for i, g in enumerate(X) if g is not None]
        for start in range(0, len(live), batch_size):
            idx = live[start : start + batch_size]
            cat, cont, _ = forward_batch(GraphBatch([X[i] for i in idx]), self.model_, "eval")
            for row, i in enumerate(idx):
                out[i] = Prediction(cat[row], cont[row], False, X[i].caption_id)
        return [p if p is not None else degenerate_prediction() for p in out]

    def predict_proba(self, X):
        """Per-category scores in (0, 1), shape ``(n, 26)``."""
        preds = self.predict_full(X)
        return np.vstack([p.cat for p in preds]) if preds else np.zeros((0, N_EMOTIONS))

    def predict_vad(self, X):
        preds = self.predict_full(X)
        return np.vstack([p.cont for p in preds]) if preds else np.zeros((0, N_VAD))

    def predict(self, X, threshold=0.5):
        """Label indicator matrix obtained by thresholding :meth:`predict_proba`."""
        return (self.predict_proba(X) >= threshold).astype(int)

    def score(self, X, y, sample_weight=None):
        """Mean average precision over categories with at least one positive."""
        from ..evaluation import mean_average_precision

        y_cat, _ = check_targets(y, len(X))
        return mean_average_precision(self.predict_proba(X), y_cat)

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.input_tags.two_d_array = False
        tags.target_tags.multi_output = True
        return tags
