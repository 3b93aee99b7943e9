"""Parameter updates: Adam (training default) and plain SGD, both with
optional global-norm gradient clipping. Grads are zeroed after each step."""

from __future__ import annotations

import math

import numpy as np

from histnorm.numerics import kernels
from histnorm.numerics.tensor import Parameter


class OptimizerError(RuntimeError):
    pass


class Optimizer:
    def __init__(
        self,
        params: list[Parameter],
        kind: str = "adam",
        lr: float = 1e-3,
        betas: tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
        clip_norm: float | None = 5.0,
    ):
        if kind not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer kind {kind!r}")
        self.params = list(params)
        self.kind = kind
        self.lr = lr
        self.betas = betas
        self.eps = eps
        self.clip_norm = clip_norm
        self._t = 0
        if kind == "adam":
            self._m = [np.zeros(p.data.size) for p in self.params]
            self._v = [np.zeros(p.data.size) for p in self.params]

    def step(self) -> None:
        # refuse to touch anything if any gradient went non-finite
        sq = 0.0
        for p in self.params:
            g = p.grad.ravel()
            s = float(np.dot(g, g))
            if not math.isfinite(s):
                raise OptimizerError(f"non-finite gradient in parameter {p.name!r}")
            sq += s
        norm = math.sqrt(sq)
        scale = 1.0
        if self.clip_norm is not None and norm > self.clip_norm:
            scale = self.clip_norm / norm

        k = kernels.active
        if self.kind == "adam":
            self._t += 1
            b1, b2 = self.betas
            bc1 = 1.0 - b1**self._t
            bc2 = 1.0 - b2**self._t
            for p, m, v in zip(self.params, self._m, self._v):
                k.adam_step(p.data.ravel(), p.grad.ravel(), m, v, self.lr, b1, b2, self.eps, bc1, bc2, scale)
        else:
            for p in self.params:
                k.sgd_step(p.data.ravel(), p.grad.ravel(), self.lr, scale)

        for p in self.params:
            p.grad[...] = 0.0


def optimizer_step(opt: Optimizer) -> None:
    opt.step()
