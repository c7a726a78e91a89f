"""Word/emotion and word/word co-occurrence statistics over a normalized corpus."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse
from sklearn.base import BaseEstimator

from .constants import DEFAULT_WINDOW, EMOTIONS, N_EMOTIONS

FORMAT_VERSION = 1


class CooccurrenceFormatError(ValueError):
    pass


@dataclass
class CooccurrenceModel:
    """Mined co-occurrence counts.

    ``m_c`` (W x C) and ``m_w`` (W x W) are scipy CSR matrices of int64 counts;
    ``m_w`` is symmetric with a zero diagonal.
    """

    vocab: list
    m_c: sparse.csr_matrix
    m_w: sparse.csr_matrix
    word_total: np.ndarray
    category_prior: np.ndarray
    window: int = DEFAULT_WINDOW
    emotions: list = field(default_factory=lambda: list(EMOTIONS))
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.index = {w: i for i, w in enumerate(self.vocab)}
        if len(self.index) != len(self.vocab):
            raise ValueError("vocab contains duplicates")
        self._mc_rows = np.asarray(self.m_c.sum(axis=1)).ravel()

    def __eq__(self, other):
        if not isinstance(other, CooccurrenceModel):
            return NotImplemented
        return (
            self.vocab == other.vocab
            and self.emotions == other.emotions
            and self.window == other.window
            and np.array_equal(self.word_total, other.word_total)
            and np.array_equal(self.category_prior, other.category_prior)
            and (self.m_c != other.m_c).nnz == 0
            and (self.m_w != other.m_w).nnz == 0
        )

    def __contains__(self, word):
        return word in self.index


def mine(corpus, window=DEFAULT_WINDOW):
    """Count emotion and sliding-window word co-occurrences.

    Every occurrence of a word adds one count per ground-truth label of its
    caption. Two positions ``i < j`` with ``j - i <= window - 1`` holding
    distinct words add one count in both directions of ``m_w``.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if not corpus:
        raise ValueError("cannot mine an empty corpus")

    vocab, index = [], {}
    for nc in corpus:
        for w in nc.valid_words:
            if w not in index:
                index[w] = len(vocab)
                vocab.append(w)

    emo = Counter()
    pairs = Counter()
    totals = np.zeros(len(vocab), dtype=np.int64)
    label_counts = np.zeros(N_EMOTIONS, dtype=np.int64)
    for nc in corpus:
        ids = [index[w] for w in nc.valid_words]
        labels = sorted(nc.labels)
        label_counts[labels] += 1
        for pos, i in enumerate(ids):
            totals[i] += 1
            for c in labels:
                emo[i, c] += 1
            for j in ids[pos + 1 : pos + window]:
                if i != j:
                    pairs[i, j] += 1
                    pairs[j, i] += 1

    W = len(vocab)
    return CooccurrenceModel(
        vocab=vocab,
        m_c=_counter_to_csr(emo, (W, N_EMOTIONS)),
        m_w=_counter_to_csr(pairs, (W, W)),
        word_total=totals,
        category_prior=label_counts / len(corpus),
        window=window,
    )


def _counter_to_csr(counter, shape):
    if not counter:
        return sparse.csr_matrix(shape, dtype=np.int64)
    keys = np.array(list(counter.keys()), dtype=np.int64)
    vals = np.fromiter(counter.values(), dtype=np.int64, count=len(counter))
    m = sparse.csr_matrix((vals, (keys[:, 0], keys[:, 1])), shape=shape, dtype=np.int64)
    m.sort_indices()
    return m


def emotion_distribution(model, word):
    """P(emotion | word) from the emotion co-occurrence row; uniform for unseen words."""
    i = model.index.get(word)
    if i is None or model._mc_rows[i] == 0:
        return np.full(N_EMOTIONS, 1.0 / N_EMOTIONS)
    row = model.m_c.getrow(i).toarray().ravel().astype(np.float64)
    return row / model._mc_rows[i]


def word_pair_weight(model, src, dst):
    """Directed word-word weight ``m_w[src, dst] / word_total[src]``."""
    try:
        i, j = model.index[src], model.index[dst]
    except KeyError as exc:
        raise KeyError(f"word not in co-occurrence vocabulary: {exc.args[0]!r}") from None
    total = model.word_total[i]
    if total == 0:
        return 0.0
    return float(model.m_w[i, j]) / float(total)


def _triplets(m):
    coo = m.tocoo()
    order = np.lexsort((coo.col, coo.row))
    return [[int(coo.row[k]), int(coo.col[k]), int(coo.data[k])] for k in order]


def to_dict(model):
    return {
        "version": FORMAT_VERSION,
        "window": model.window,
        "vocab": list(model.vocab),
        "emotions": list(model.emotions),
        "word_total": [int(x) for x in model.word_total],
        "category_prior": [float(x) for x in model.category_prior],
        "m_c": _triplets(model.m_c),
        "m_w": _triplets(model.m_w),
        "meta": model.meta,
    }


def from_dict(d):
    version = d.get("version")
    if version != FORMAT_VERSION:
        raise CooccurrenceFormatError(f"unsupported co-occurrence format version {version!r} (expected {FORMAT_VERSION})")
    try:
        vocab = list(d["vocab"])
        emotions = list(d["emotions"])
        W, C = len(vocab), len(emotions)

        def csr(trips, shape):
            if not trips:
                return sparse.csr_matrix(shape, dtype=np.int64)
            a = np.asarray(trips, dtype=np.int64)
            m = sparse.csr_matrix((a[:, 2], (a[:, 0], a[:, 1])), shape=shape, dtype=np.int64)
            m.sort_indices()
            return m

        return CooccurrenceModel(
            vocab=vocab,
            m_c=csr(d["m_c"], (W, C)),
            m_w=csr(d["m_w"], (W, W)),
            word_total=np.asarray(d["word_total"], dtype=np.int64),
            category_prior=np.asarray(d["category_prior"], dtype=np.float64),
            window=int(d["window"]),
            emotions=emotions,
            meta=d.get("meta", {}),
        )
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise CooccurrenceFormatError(f"corrupt co-occurrence payload: {exc}") from None


def save(model, path):
    Path(path).write_text(json.dumps(to_dict(model)) + "\n", encoding="utf-8")


def load(path):
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        raise CooccurrenceFormatError(f"{path}: empty file")
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CooccurrenceFormatError(f"{path}: truncated or invalid JSON ({exc})") from None
    return from_dict(d)


class CooccurrenceMiner(BaseEstimator):
    """Estimator wrapper around :func:`mine`; the fitted model lives in ``model_``."""

    def __init__(self, window=DEFAULT_WINDOW):
        self.window = window

    def fit(self, X, y=None):
        self.model_ = mine(list(X), window=self.window)
        return self
