"""Per-caption context graphs: valid words linked to emotions, moods and related concepts."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .constants import DEFAULT_WINDOW, EMBED_DIM, emotion_key
from .cooccurrence import emotion_distribution, mine, word_pair_weight
from .lexicon import Lexicon

log = logging.getLogger(__name__)

NODE_KINDS = ("word", "emotion", "mood", "related")


class GraphFormatError(ValueError):
    pass


@dataclass
class ContextGraph:
    """Node-typed, edge-weighted graph. Every logical connection is stored in both directions."""

    caption_id: str
    kinds: list
    labels: list
    x: np.ndarray  # (n_nodes, feature_dim)
    src: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    dst: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    weight: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def n_nodes(self):
        return len(self.kinds)

    @property
    def n_edges(self):
        return len(self.src)

    def nodes_of(self, kind):
        return [i for i, k in enumerate(self.kinds) if k == kind]

    def edge_weights(self):
        """``{(src, dst): weight}`` view, handy for inspection and tests."""
        return {(int(s), int(d)): float(w) for s, d, w in zip(self.src, self.dst, self.weight)}

    def permuted(self, perm):
        """Copy with node ``i`` relabelled to ``perm[i]``."""
        perm = np.asarray(perm)
        inv = np.argsort(perm)
        return ContextGraph(
            self.caption_id,
            [self.kinds[i] for i in inv],
            [self.labels[i] for i in inv],
            self.x[inv],
            perm[self.src],
            perm[self.dst],
            self.weight.copy(),
        )

    def __eq__(self, other):
        if not isinstance(other, ContextGraph):
            return NotImplemented
        return (
            self.caption_id == other.caption_id
            and self.kinds == other.kinds
            and self.labels == other.labels
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.weight, other.weight)
        )


class _GraphAccumulator:
    def __init__(self, lexicon):
        self.lexicon = lexicon
        self.ids = {}
        self.kinds, self.labels, self.features = [], [], []
        self.edges = {}

    def node(self, kind, label, feature_key=None):
        key = (kind, label)
        nid = self.ids.get(key)
        if nid is None:
            nid = self.ids[key] = len(self.kinds)
            self.kinds.append(kind)
            self.labels.append(label)
            self.features.append(self.lexicon.embed(feature_key or label))
        return nid

    def edge(self, a, b, w):
        if a != b:
            self.edges.setdefault((a, b), float(w))

    def link(self, a, b, w):
        self.edge(a, b, w)
        self.edge(b, a, w)

    def finish(self, caption_id):
        if self.edges:
            pairs = np.array(list(self.edges.keys()), dtype=np.int64)
            src, dst = pairs[:, 0], pairs[:, 1]
            weight = np.fromiter(self.edges.values(), dtype=np.float64, count=len(self.edges))
        else:
            src = dst = np.zeros(0, dtype=np.int64)
            weight = np.zeros(0)
        return ContextGraph(caption_id, self.kinds, self.labels, np.vstack(self.features), src, dst, weight)


def build_graph(nc, co, lexicon):
    """Build the context graph of one normalized caption, or ``None`` when no word survives."""
    words = []
    for w in dict.fromkeys(nc.valid_words):
        entry = lexicon.lookup(w)
        if entry is not None:
            words.append((w, entry))
    if not words:
        return None

    g = _GraphAccumulator(lexicon)
    word_ids = [g.node("word", w) for w, _ in words]

    emotion_ids = [g.node("emotion", name, emotion_key(name)) for name in co.emotions]
    for wid, (w, _) in zip(word_ids, words):
        for eid, p in zip(emotion_ids, emotion_distribution(co, w)):
            g.link(wid, eid, p)

    for wid, (_, entry) in zip(word_ids, words):
        for mood in entry.mood_tags:
            g.link(wid, g.node("mood", mood), entry.pleasantness)
        for rel in entry.related:
            g.link(wid, g.node("related", rel), entry.polarity)

    # second level: related concepts of each related concept, weighted by the first-level polarity
    for _, entry in words:
        for rel in entry.related:
            rel_entry = lexicon.lookup(rel)
            if rel_entry is None:
                continue
            rid = g.node("related", rel)
            for rel2 in rel_entry.related:
                g.link(rid, g.node("related", rel2), rel_entry.polarity)

    for a, (wa, _) in zip(word_ids, words):
        if wa not in co:
            continue
        for b, (wb, _) in zip(word_ids, words):
            if a != b and wb in co:
                w = word_pair_weight(co, wa, wb)
                if w > 0:
                    g.edge(a, b, w)

    return g.finish(nc.id)


def graph_to_dict(g):
    return {
        "caption_id": g.caption_id,
        "nodes": [
            {"id": i, "kind": k, "label": lab, "feature": [float(v) for v in g.x[i]]}
            for i, (k, lab) in enumerate(zip(g.kinds, g.labels))
        ],
        "edges": [
            {"src": int(s), "dst": int(d), "weight": float(w)} for s, d, w in zip(g.src, g.dst, g.weight)
        ],
    }


def serialize_graph(g):
    return json.dumps(graph_to_dict(g)).encode("utf-8")


def parse_graph(data):
    try:
        d = json.loads(data)
        nodes, edges = d["nodes"], d["edges"]
        caption_id = d["caption_id"]
    except (json.JSONDecodeError, UnicodeDecodeError, KeyError, TypeError) as exc:
        raise GraphFormatError(f"malformed graph JSON: {exc}") from None
    n = len(nodes)
    if n == 0:
        if edges:
            raise GraphFormatError("graph has edges but no nodes")
        raise GraphFormatError("graph has no nodes")
    try:
        for i, nd in enumerate(nodes):
            if nd["id"] != i:
                raise GraphFormatError(f"node ids must be dense 0..{n - 1}; got {nd['id']} at position {i}")
            if nd["kind"] not in NODE_KINDS:
                raise GraphFormatError(f"unknown node kind {nd['kind']!r}")
        x = np.array([nd["feature"] for nd in nodes], dtype=np.float64)
        if x.ndim != 2:
            raise GraphFormatError("node features have inconsistent lengths")
        src = np.array([e["src"] for e in edges], dtype=np.int64)
        dst = np.array([e["dst"] for e in edges], dtype=np.int64)
        weight = np.array([e["weight"] for e in edges], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, GraphFormatError):
            raise
        raise GraphFormatError(f"malformed graph JSON: {exc}") from None
    for arr in (src, dst):
        bad = arr[(arr < 0) | (arr >= n)]
        if bad.size:
            raise GraphFormatError(f"edge references missing node {int(bad[0])} (graph has {n} nodes)")
    if not np.all(np.isfinite(weight)):
        raise GraphFormatError("non-finite edge weight")
    return ContextGraph(
        caption_id, [nd["kind"] for nd in nodes], [nd["label"] for nd in nodes], x, src, dst, weight
    )


def save_graph(g, path):
    Path(path).write_bytes(serialize_graph(g))


def load_graph(path):
    return parse_graph(Path(path).read_bytes())


def _safe_name(caption_id):
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in caption_id)[:64]


def build_corpus_graphs(corpus, co, lexicon, out_dir, threads=1, meta=None):
    """Write one ``graph.json`` per buildable caption plus ``manifest.json``; return the manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    corpus = list(corpus)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            graphs = list(pool.map(lambda nc: build_graph(nc, co, lexicon), corpus))
    else:
        graphs = [build_graph(nc, co, lexicon) for nc in corpus]

    built, skipped = [], []
    for i, (nc, g) in enumerate(zip(corpus, graphs)):
        if g is None:
            log.warning("caption %s has no usable valid words; skipped", nc.id)
            skipped.append(nc.id)
            continue
        name = f"{i:05d}_{_safe_name(nc.id)}.json"
        save_graph(g, out_dir / name)
        built.append({"caption_id": nc.id, "file": name})
    manifest = {"built": built, "skipped": skipped, "meta": meta or {}}
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")
    return manifest


def load_corpus_graphs(graph_dir):
    """Read a manifest and its graphs; returns ``(manifest, {caption_id: ContextGraph})``."""
    graph_dir = Path(graph_dir)
    manifest = json.loads((graph_dir / "manifest.json").read_text(encoding="utf-8"))
    graphs = {rec["caption_id"]: load_graph(graph_dir / rec["file"]) for rec in manifest["built"]}
    return manifest, graphs


class GraphBuilder(TransformerMixin, BaseEstimator):
    """Turn normalized captions into :class:`ContextGraph` objects (``None`` for unbuildable ones).

    ``fit`` mines co-occurrence statistics from the training captions unless a
    pre-mined ``cooccurrence`` model is supplied.
    """

    def __init__(self, lexicon=None, cooccurrence=None, window=DEFAULT_WINDOW, threads=1):
        self.lexicon = lexicon
        self.cooccurrence = cooccurrence
        self.window = window
        self.threads = threads

    def fit(self, X, y=None):
        self.lexicon_ = self.lexicon if self.lexicon is not None else Lexicon.bundled()
        self.cooccurrence_ = self.cooccurrence if self.cooccurrence is not None else mine(list(X), self.window)
        self.n_features_out_ = EMBED_DIM
        return self

    def transform(self, X):
        if not hasattr(self, "cooccurrence_"):
            raise NotFittedError("GraphBuilder must be fitted before transform")
        if self.threads > 1:
            with ThreadPoolExecutor(self.threads) as pool:
                return list(pool.map(lambda nc: build_graph(nc, self.cooccurrence_, self.lexicon_), X))
        return [build_graph(nc, self.cooccurrence_, self.lexicon_) for nc in X]
