"""JSON checkpoints holding every tensor at full float64 precision."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .model import GinModel

FORMAT_VERSION = 1


class CheckpointError(ValueError):
    pass


def _tensor(a):
    a = np.asarray(a, dtype=np.float64)
    return {"shape": list(a.shape), "values": [float(v) for v in a.ravel()]}


def _array(t):
    return np.array(t["values"], dtype=np.float64).reshape(t["shape"])


def checkpoint_dict(model, optimizer=None, meta=None):
    cfg = model.config
    d = {
        "version": FORMAT_VERSION,
        "dims": {"input": cfg.pop("input_dim"), "hidden": cfg.pop("hidden"), "d_read": cfg.pop("d_read")},
        "pooling": cfg.pop("pooling"),
        "config": cfg,
        "tensors": {name: _tensor(v) for name, v in {**model.params, **model.buffers}.items()},
        "meta": meta or {},
    }
    if optimizer is not None:
        sd = optimizer.state_dict()
        d["optimizer_state"] = {
            **{k: sd[k] for k in ("lr", "rho", "eps", "weight_decay")},
            "state": {
                name: {slot: _tensor(arr) for slot, arr in slots.items()} for name, slots in sd["state"].items()
            },
        }
    return d


def save_checkpoint(model, path, optimizer=None, meta=None):
    Path(path).write_text(json.dumps(checkpoint_dict(model, optimizer, meta)) + "\n", encoding="utf-8")


def model_from_dict(d, expected_dims=None):
    if d.get("version") != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {d.get('version')!r}")
    try:
        dims = d["dims"]
        if expected_dims:
            for key, want in expected_dims.items():
                if dims.get(key) != want:
                    raise CheckpointError(f"checkpoint has {key}={dims.get(key)}, configuration expects {want}")
        model = GinModel(
            input_dim=dims["input"], hidden=dims["hidden"], d_read=dims["d_read"], pooling=d["pooling"], **d["config"]
        )
        tensors = d["tensors"]
        for group, shapes in ((model.params, model.expected_shapes()), (model.buffers, model.expected_buffer_shapes())):
            for name, shape in shapes.items():
                if name not in tensors:
                    raise CheckpointError(f"checkpoint lacks tensor {name!r}")
                arr = _array(tensors[name])
                if arr.shape != tuple(shape):
                    raise CheckpointError(f"tensor {name!r} has shape {arr.shape}, declared dims imply {tuple(shape)}")
                group[name] = arr
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, CheckpointError):
            raise
        raise CheckpointError(f"corrupt checkpoint: {exc}") from None
    return model


def load_checkpoint(path, expected_dims=None, with_optimizer=False):
    """Load a model (and, with ``with_optimizer``, an :class:`Adadelta` or ``None``)."""
    from .optim import Adadelta

    try:
        d = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"{path}: truncated or invalid checkpoint ({exc})") from None
    model = model_from_dict(d, expected_dims)
    if not with_optimizer:
        return model
    opt = None
    if "optimizer_state" in d:
        os_ = d["optimizer_state"]
        opt = Adadelta(os_["lr"], os_["rho"], os_["eps"], os_["weight_decay"])
        opt.state = {n: {s: _array(t) for s, t in slots.items()} for n, slots in os_["state"].items()}
    return model, opt
