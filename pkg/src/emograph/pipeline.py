"""End-to-end inference (caption text -> prediction) and the composed sklearn pipeline."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

from sklearn.pipeline import Pipeline

from .gin.estimator import GINEmotionClassifier, degenerate_prediction
from .gin.model import forward
from .graph import GraphBuilder, build_graph
from .text import Caption, CaptionNormalizer, NormalizationConfig, normalize


class Predictor:
    """Frozen normalize -> build_graph -> forward chain for single captions."""

    def __init__(self, cooccurrence, lexicon, model, norm_config=None):
        self.cooccurrence = cooccurrence
        self.lexicon = lexicon
        self.model = model
        self.norm_config = norm_config or NormalizationConfig.default()

    def graph_for(self, caption):
        if isinstance(caption, str):
            caption = Caption("", caption)
        return build_graph(normalize(caption, self.norm_config), self.cooccurrence, self.lexicon)

    def predict_one(self, caption):
        cid = caption.id if isinstance(caption, Caption) else None
        g = self.graph_for(caption)
        if g is None:
            return degenerate_prediction(cid)
        pred = forward(g, self.model, "eval")
        pred.caption_id = cid
        return pred

    __call__ = predict_one

    def predict(self, captions, threads=1):
        if threads > 1:
            with ThreadPoolExecutor(threads) as pool:
                return list(pool.map(self.predict_one, captions))
        return [self.predict_one(c) for c in captions]


def predict(captions, co, lexicon, model, norm_config=None, threads=1):
    """Predictions for raw captions; captions without a buildable graph come back ``degenerate``."""
    return Predictor(co, lexicon, model, norm_config).predict(captions, threads)


def make_emotion_pipeline(lexicon=None, window=3, **classifier_params):
    """``Pipeline`` of normalizer, graph builder and GIN classifier, fit on :class:`Caption` lists."""
    return Pipeline(
        [
            ("normalize", CaptionNormalizer()),
            ("graphs", GraphBuilder(lexicon=lexicon, window=window)),
            ("gin", GINEmotionClassifier(**classifier_params)),
        ]
    )
