"""Weighted GIN graph classifier with hand-written reverse-mode gradients.

Layout of one block ``k`` (``k = 1..n_layers``)::

    agg   = (1 + eps_k) * h_prev + A @ h_prev        # A[v, u] = weight(u -> v)
    h_k   = relu(bn_k(W2 relu(W1 agg + b1) + b2))

Readout pools every ``h_k`` per graph (mean or sum), projects each to
``d_read`` and sums the projections into ``z``; the heads are
``sigmoid(z Wc + bc)`` (26 categories) and ``z Wv + bv`` (VAD).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from ..constants import EMBED_DIM, N_EMOTIONS, N_VAD

POOLINGS = ("avg", "sum")


class GraphBatch:
    """Disjoint union of graphs; pooling respects graph boundaries."""

    def __init__(self, graphs):
        if not graphs:
            raise ValueError("empty batch")
        sizes = np.array([g.n_nodes for g in graphs], dtype=np.int64)
        if np.any(sizes == 0):
            raise ValueError("cannot run the model on a graph with no nodes")
        offsets = np.concatenate([[0], np.cumsum(sizes)])
        n = int(offsets[-1])
        self.n_graphs = len(graphs)
        self.n_nodes = n
        self.sizes = sizes
        self.x = np.vstack([g.x for g in graphs]).astype(np.float64, copy=False)
        src = np.concatenate([g.src + o for g, o in zip(graphs, offsets)])
        dst = np.concatenate([g.dst + o for g, o in zip(graphs, offsets)])
        w = np.concatenate([g.weight for g in graphs]).astype(np.float64, copy=False)
        self.adj = sparse.csr_matrix((w, (dst, src)), shape=(n, n))
        self.adj_t = self.adj.T.tocsr()
        graph_of = np.repeat(np.arange(self.n_graphs), sizes)
        cols = np.arange(n)
        self.pool = {
            "sum": sparse.csr_matrix((np.ones(n), (graph_of, cols)), shape=(self.n_graphs, n)),
            "avg": sparse.csr_matrix((1.0 / sizes[graph_of], (graph_of, cols)), shape=(self.n_graphs, n)),
        }


def _glorot(rng, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


@dataclass
class Prediction:
    cat: np.ndarray
    cont: np.ndarray
    degenerate: bool = False
    caption_id: str | None = None


class GinModel:
    """Parameters (``params``) and batch-norm running statistics (``buffers``) of the classifier."""

    def __init__(
        self,
        input_dim=EMBED_DIM,
        hidden=64,
        d_read=64,
        n_layers=5,
        pooling="avg",
        readout_skip_h0=False,
        n_cat=N_EMOTIONS,
        n_cont=N_VAD,
        bn_momentum=0.1,
        bn_eps=1e-5,
    ):
        if pooling not in POOLINGS:
            raise ValueError(f"pooling must be one of {POOLINGS}, got {pooling!r}")
        if n_layers < 1:
            raise ValueError("n_layers must be >= 1")
        self.input_dim = input_dim
        self.hidden = hidden
        self.d_read = d_read
        self.n_layers = n_layers
        self.pooling = pooling
        self.readout_skip_h0 = readout_skip_h0
        self.n_cat = n_cat
        self.n_cont = n_cont
        self.bn_momentum = bn_momentum
        self.bn_eps = bn_eps
        self.params = {}
        self.buffers = {}

    @property
    def config(self):
        return dict(
            input_dim=self.input_dim,
            hidden=self.hidden,
            d_read=self.d_read,
            n_layers=self.n_layers,
            pooling=self.pooling,
            readout_skip_h0=self.readout_skip_h0,
            n_cat=self.n_cat,
            n_cont=self.n_cont,
            bn_momentum=self.bn_momentum,
            bn_eps=self.bn_eps,
        )

    def layer_dim(self, k):
        return self.input_dim if k == 0 else self.hidden

    def readout_layers(self):
        return range(1 if self.readout_skip_h0 else 0, self.n_layers + 1)

    def expected_shapes(self):
        shapes = {"eps": (self.n_layers,)}
        for k in range(1, self.n_layers + 1):
            d_in = self.layer_dim(k - 1)
            shapes[f"mlp{k}.w1"] = (d_in, self.hidden)
            shapes[f"mlp{k}.b1"] = (self.hidden,)
            shapes[f"mlp{k}.w2"] = (self.hidden, self.hidden)
            shapes[f"mlp{k}.b2"] = (self.hidden,)
            shapes[f"bn{k}.gamma"] = (self.hidden,)
            shapes[f"bn{k}.beta"] = (self.hidden,)
        for k in self.readout_layers():
            shapes[f"readout{k}.w"] = (self.layer_dim(k), self.d_read)
            shapes[f"readout{k}.b"] = (self.d_read,)
        shapes["head_cat.w"] = (self.d_read, self.n_cat)
        shapes["head_cat.b"] = (self.n_cat,)
        shapes["head_cont.w"] = (self.d_read, self.n_cont)
        shapes["head_cont.b"] = (self.n_cont,)
        return shapes

    def expected_buffer_shapes(self):
        shapes = {}
        for k in range(1, self.n_layers + 1):
            shapes[f"bn{k}.running_mean"] = (self.hidden,)
            shapes[f"bn{k}.running_var"] = (self.hidden,)
        return shapes

    @classmethod
    def initialize(cls, seed=0, **config):
        """Seeded Glorot-uniform weights, zero biases, ``eps = 0``, identity batch norm."""
        m = cls(**config)
        rng = np.random.default_rng(seed)
        for name, shape in m.expected_shapes().items():
            if name == "eps" or name.endswith((".b", ".b1", ".b2", ".beta")):
                m.params[name] = np.zeros(shape)
            elif name.endswith(".gamma"):
                m.params[name] = np.ones(shape)
            else:
                m.params[name] = _glorot(rng, *shape)
        for name, shape in m.expected_buffer_shapes().items():
            m.buffers[name] = np.ones(shape) if name.endswith("var") else np.zeros(shape)
        return m

    def copy(self):
        m = GinModel(**self.config)
        m.params = {k: v.copy() for k, v in self.params.items()}
        m.buffers = {k: v.copy() for k, v in self.buffers.items()}
        return m

    def n_parameters(self):
        return sum(v.size for v in self.params.values())


def _relu(x):
    return np.maximum(x, 0.0)


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def gin_layer(batch, h_prev, model, k, mode="eval", use_bn=True, cache=None):
    """One GIN block; ``cache`` (a dict) collects what :func:`backward` needs."""
    if h_prev.shape != (batch.n_nodes, model.layer_dim(k - 1)):
        raise ValueError(
            f"layer {k}: expected input of shape {(batch.n_nodes, model.layer_dim(k - 1))}, got {h_prev.shape}"
        )
    p = model.params
    scale = 1.0 + p["eps"][k - 1]
    agg = scale * h_prev + batch.adj @ h_prev
    z1 = agg @ p[f"mlp{k}.w1"] + p[f"mlp{k}.b1"]
    a1 = _relu(z1)
    z2 = a1 @ p[f"mlp{k}.w2"] + p[f"mlp{k}.b2"]
    if use_bn:
        if mode == "train":
            mu = z2.mean(axis=0)
            var = z2.var(axis=0)
            n = z2.shape[0]
            mom = model.bn_momentum
            unbiased = var * n / (n - 1) if n > 1 else var
            rm, rv = f"bn{k}.running_mean", f"bn{k}.running_var"
            model.buffers[rm] = (1 - mom) * model.buffers[rm] + mom * mu
            model.buffers[rv] = (1 - mom) * model.buffers[rv] + mom * unbiased
        elif mode == "eval":
            mu = model.buffers[f"bn{k}.running_mean"]
            var = model.buffers[f"bn{k}.running_var"]
        else:
            raise ValueError(f"mode must be 'train' or 'eval', got {mode!r}")
        inv = 1.0 / np.sqrt(var + model.bn_eps)
        xhat = (z2 - mu) * inv
        y = p[f"bn{k}.gamma"] * xhat + p[f"bn{k}.beta"]
    else:
        inv = xhat = None
        y = z2
    h = _relu(y)
    if cache is not None:
        cache[k] = dict(h_prev=h_prev, agg=agg, z1=z1, a1=a1, inv=inv, xhat=xhat, y=y, mode=mode, use_bn=use_bn)
    return h


def forward_batch(batch, model, mode="eval", use_bn=True, keep_cache=False):
    """Run the network on a :class:`GraphBatch`; returns ``(cat, cont, cache)``."""
    cache = {} if keep_cache else None
    p = model.params
    hs = [batch.x]
    for k in range(1, model.n_layers + 1):
        hs.append(gin_layer(batch, hs[-1], model, k, mode, use_bn, cache))
    pool = batch.pool[model.pooling]
    z = np.zeros((batch.n_graphs, model.d_read))
    pooled = {}
    for k in model.readout_layers():
        pooled[k] = pool @ hs[k]
        z += pooled[k] @ p[f"readout{k}.w"] + p[f"readout{k}.b"]
    cat = _sigmoid(z @ p["head_cat.w"] + p["head_cat.b"])
    cont = z @ p["head_cont.w"] + p["head_cont.b"]
    if keep_cache:
        cache.update(hs=hs, pooled=pooled, z=z, cat=cat, batch=batch)
    return cat, cont, cache


def backward(cache, model, d_cat, d_cont):
    """Gradients of a scalar loss w.r.t. every parameter, given its gradients w.r.t. both heads."""
    p = model.params
    batch = cache["batch"]
    cat, z, hs = cache["cat"], cache["z"], cache["hs"]
    grads = {}

    d_logit = d_cat * cat * (1.0 - cat)
    grads["head_cat.w"] = z.T @ d_logit
    grads["head_cat.b"] = d_logit.sum(axis=0)
    grads["head_cont.w"] = z.T @ d_cont
    grads["head_cont.b"] = d_cont.sum(axis=0)
    dz = d_logit @ p["head_cat.w"].T + d_cont @ p["head_cont.w"].T

    pool_t = batch.pool[model.pooling].T
    dh = [None] * (model.n_layers + 1)
    for k in model.readout_layers():
        grads[f"readout{k}.w"] = cache["pooled"][k].T @ dz
        grads[f"readout{k}.b"] = dz.sum(axis=0)
        dh[k] = pool_t @ (dz @ p[f"readout{k}.w"].T)

    d_eps = np.zeros(model.n_layers)
    for k in range(model.n_layers, 0, -1):
        c = cache[k]
        g = dh[k] if dh[k] is not None else np.zeros_like(hs[k])
        dy = g * (c["y"] > 0)
        if c["use_bn"]:
            xhat, inv = c["xhat"], c["inv"]
            grads[f"bn{k}.gamma"] = (dy * xhat).sum(axis=0)
            grads[f"bn{k}.beta"] = dy.sum(axis=0)
            dxhat = dy * p[f"bn{k}.gamma"]
            if c["mode"] == "train":
                n = dxhat.shape[0]
                dz2 = (inv / n) * (n * dxhat - dxhat.sum(axis=0) - xhat * (dxhat * xhat).sum(axis=0))
            else:
                dz2 = dxhat * inv
        else:
            grads[f"bn{k}.gamma"] = np.zeros(model.hidden)
            grads[f"bn{k}.beta"] = np.zeros(model.hidden)
            dz2 = dy
        grads[f"mlp{k}.w2"] = c["a1"].T @ dz2
        grads[f"mlp{k}.b2"] = dz2.sum(axis=0)
        dz1 = (dz2 @ p[f"mlp{k}.w2"].T) * (c["z1"] > 0)
        grads[f"mlp{k}.w1"] = c["agg"].T @ dz1
        grads[f"mlp{k}.b1"] = dz1.sum(axis=0)
        dagg = dz1 @ p[f"mlp{k}.w1"].T
        d_eps[k - 1] = np.sum(dagg * c["h_prev"])
        if k > 1:
            back = (1.0 + p["eps"][k - 1]) * dagg + batch.adj_t @ dagg
            dh[k - 1] = back if dh[k - 1] is None else dh[k - 1] + back
    grads["eps"] = d_eps
    return grads


def forward(g, model, mode="eval"):
    """Prediction for a single :class:`~emograph.graph.ContextGraph`."""
    if g is None or g.n_nodes == 0:
        raise ValueError("cannot run the model on an empty graph")
    cat, cont, _ = forward_batch(GraphBatch([g]), model, mode)
    return Prediction(cat[0], cont[0], caption_id=g.caption_id)
