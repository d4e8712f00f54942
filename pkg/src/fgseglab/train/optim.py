"""Optimizers with explicitly documented update rules.

Per-parameter state is allocated lazily; frozen parameters are skipped
entirely (no state, no update), which keeps them bit-identical to their
initial values.  ``lr`` is mutable so the plateau callback can anneal it.

Update rules (g = gradient, all element-wise):

* sgd:       theta -= lr * g
* adam:      m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g^2;
             mhat = m/(1-b1^t);  vhat = v/(1-b2^t);
             theta -= lr * mhat / (sqrt(vhat) + eps)        (b1=.9 b2=.999 eps=1e-8)
* rmsprop:   v = rho*v + (1-rho)*g^2;
             theta -= lr * g / (sqrt(v) + eps)              (rho=.9 eps=1e-8)
* adagrad:   a += g^2;  theta -= lr * g / (sqrt(a) + eps)   (eps=1e-8)
* adadelta:  Eg = rho*Eg + (1-rho)*g^2;
             d  = -sqrt(Ed + eps)/sqrt(Eg + eps) * g;
             Ed = rho*Ed + (1-rho)*d^2;  theta += lr * d    (rho=.95 eps=1e-6;
             lr acts as a plain scale on the adaptive step)
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigurationError
from .schedule import TrainSchedule


class Optimizer:
    def __init__(self, lr):
        self.lr = float(lr)
        self.state: dict[str, dict] = {}

    def step(self, pset, grads):
        for name in pset.trainable_names():
            g = grads.get(name)
            if g is None:
                continue
            self._update(name, pset.params[name], g.astype(pset.params[name].dtype,
                                                           copy=False))

    def _slot(self, name, like, keys):
        if name not in self.state:
            self.state[name] = {k: np.zeros_like(like) for k in keys}
            self.state[name]["t"] = 0
        return self.state[name]

    def _update(self, name, theta, g):  # pragma: no cover - abstract
        raise NotImplementedError


class SGD(Optimizer):
    def _update(self, name, theta, g):
        theta -= self.lr * g


class Adam(Optimizer):
    def __init__(self, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        super().__init__(lr)
        self.beta1, self.beta2, self.eps = beta1, beta2, eps

    def _update(self, name, theta, g):
        s = self._slot(name, theta, ("m", "v"))
        s["t"] += 1
        s["m"] = self.beta1 * s["m"] + (1 - self.beta1) * g
        s["v"] = self.beta2 * s["v"] + (1 - self.beta2) * g * g
        mhat = s["m"] / (1 - self.beta1 ** s["t"])
        vhat = s["v"] / (1 - self.beta2 ** s["t"])
        theta -= self.lr * mhat / (np.sqrt(vhat) + self.eps)


class RMSProp(Optimizer):
    def __init__(self, lr, rho=0.9, eps=1e-8):
        super().__init__(lr)
        self.rho, self.eps = rho, eps

    def _update(self, name, theta, g):
        s = self._slot(name, theta, ("v",))
        s["v"] = self.rho * s["v"] + (1 - self.rho) * g * g
        theta -= self.lr * g / (np.sqrt(s["v"]) + self.eps)


class AdaGrad(Optimizer):
    def __init__(self, lr, eps=1e-8):
        super().__init__(lr)
        self.eps = eps

    def _update(self, name, theta, g):
        s = self._slot(name, theta, ("a",))
        s["a"] += g * g
        theta -= self.lr * g / (np.sqrt(s["a"]) + self.eps)


class AdaDelta(Optimizer):
    def __init__(self, lr, rho=0.95, eps=1e-6):
        super().__init__(lr)
        self.rho, self.eps = rho, eps

    def _update(self, name, theta, g):
        s = self._slot(name, theta, ("eg", "ed"))
        s["eg"] = self.rho * s["eg"] + (1 - self.rho) * g * g
        delta = -np.sqrt(s["ed"] + self.eps) / np.sqrt(s["eg"] + self.eps) * g
        s["ed"] = self.rho * s["ed"] + (1 - self.rho) * delta * delta
        theta += self.lr * delta


_OPTIMIZERS = {"sgd": SGD, "adam": Adam, "rmsprop": RMSProp,
               "adagrad": AdaGrad, "adadelta": AdaDelta}


def make_optimizer(schedule: TrainSchedule) -> Optimizer:
    try:
        cls = _OPTIMIZERS[schedule.optimizer]
    except KeyError:
        raise ConfigurationError(
            f"optimizer: unknown value {schedule.optimizer!r}") from None
    return cls(schedule.initial_lr)
