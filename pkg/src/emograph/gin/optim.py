"""Adadelta with decoupled weight decay, operating on dicts of numpy arrays."""

import numpy as np


class Adadelta:
    """Per parameter::

        E[g^2]  <- rho E[g^2] + (1 - rho) g^2
        delta    = -sqrt(E[dx^2] + eps) / sqrt(E[g^2] + eps) * lr * g
        E[dx^2] <- rho E[dx^2] + (1 - rho) delta^2
        theta   <- (theta + delta) * (1 - lr * weight_decay)
    """

    def __init__(self, lr=0.001, rho=0.9, eps=1e-6, weight_decay=0.0):
        self.lr = lr
        self.rho = rho
        self.eps = eps
        self.weight_decay = weight_decay
        self.state = {}

    def step(self, params, grads):
        rho, eps, lr = self.rho, self.eps, self.lr
        decay = 1.0 - lr * self.weight_decay
        for name, theta in params.items():
            g = grads[name]
            st = self.state.get(name)
            if st is None:
                st = self.state[name] = {"square_avg": np.zeros_like(theta), "acc_delta": np.zeros_like(theta)}
            sq, acc = st["square_avg"], st["acc_delta"]
            sq *= rho
            sq += (1 - rho) * g * g
            delta = -np.sqrt(acc + eps) / np.sqrt(sq + eps) * lr * g
            acc *= rho
            acc += (1 - rho) * delta * delta
            theta += delta
            if decay != 1.0:
                theta *= decay

    def state_dict(self):
        return {"lr": self.lr, "rho": self.rho, "eps": self.eps, "weight_decay": self.weight_decay, "state": self.state}

    def load_state_dict(self, d):
        self.lr, self.rho, self.eps, self.weight_decay = d["lr"], d["rho"], d["eps"], d["weight_decay"]
        self.state = {k: {n: np.array(a, dtype=np.float64) for n, a in v.items()} for k, v in d["state"].items()}
