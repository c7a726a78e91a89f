"""Input checks shared by the estimators."""

import numpy as np

from .constants import N_EMOTIONS, N_VAD
from .graph import ContextGraph

N_TARGETS = N_EMOTIONS + N_VAD


def targets_from_captions(captions):
    """Stack label indicators and VAD of (normalized) captions into an ``(n, 29)`` array."""
    y = np.zeros((len(captions), N_TARGETS))
    for i, c in enumerate(captions):
        y[i, sorted(c.labels)] = 1.0
        y[i, N_EMOTIONS:] = c.vad
    return y


def check_targets(y, n_samples=None):
    """Split targets into ``(y_cat, y_cont)``.

    Accepts an ``(n, 29)`` array (26 indicators then V, A, D) or a pair of arrays.
    """
    if isinstance(y, tuple) and len(y) == 2:
        y_cat, y_cont = (np.asarray(a, dtype=np.float64) for a in y)
    else:
        y = np.asarray(y, dtype=np.float64)
        if y.ndim != 2 or y.shape[1] != N_TARGETS:
            raise ValueError(f"y must have shape (n_samples, {N_TARGETS}), got {y.shape}")
        y_cat, y_cont = y[:, :N_EMOTIONS], y[:, N_EMOTIONS:]
    if y_cat.ndim != 2 or y_cat.shape[1] != N_EMOTIONS:
        raise ValueError(f"categorical targets must have {N_EMOTIONS} columns, got {y_cat.shape}")
    if y_cont.shape != (len(y_cat), N_VAD):
        raise ValueError(f"continuous targets must have shape ({len(y_cat)}, {N_VAD}), got {y_cont.shape}")
    if not np.all((y_cat == 0) | (y_cat == 1)):
        raise ValueError("categorical targets must be 0/1 indicators")
    if not np.all(np.isfinite(y_cont)):
        raise ValueError("continuous targets must be finite")
    if n_samples is not None and len(y_cat) != n_samples:
        raise ValueError(f"X has {n_samples} samples but y has {len(y_cat)}")
    return y_cat, y_cont


def check_graphs(X, feature_dim=None):
    """Materialize ``X`` as a list whose entries are :class:`ContextGraph` or ``None``."""
    X = list(X)
    for i, g in enumerate(X):
        if g is None:
            continue
        if not isinstance(g, ContextGraph):
            raise TypeError(f"sample {i}: expected ContextGraph or None, got {type(g).__name__}")
        if g.n_nodes == 0:
            raise ValueError(f"sample {i}: graph has no nodes")
        if feature_dim is not None and g.x.shape[1] != feature_dim:
            raise ValueError(f"sample {i}: node features have dimension {g.x.shape[1]}, expected {feature_dim}")
    return X
