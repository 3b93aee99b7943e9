"""Dense float64 tensors with a gradient slot."""

from __future__ import annotations

import numpy as np


class Tensor:
    """A numpy float64 array plus the gradient filled in by backward().

    Plain tensors start with grad=None; the backward sweep allocates it on
    first accumulation. Parameters always carry a same-shaped grad array.
    """

    __slots__ = ("data", "grad")

    def __init__(self, data):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def item(self) -> float:
        return float(self.data)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.data.shape})"


class Parameter(Tensor):
    """Trainable tensor: named, with a persistent zero-initialized grad."""

    __slots__ = ("name",)

    def __init__(self, data, name: str):
        super().__init__(np.ascontiguousarray(data, dtype=np.float64))
        self.name = name
        self.grad = np.zeros_like(self.data)

    def __repr__(self) -> str:
        return f"Parameter({self.name}, shape={self.data.shape})"


def accumulate(t: Tensor, arr: np.ndarray, own: bool = False) -> None:
    """Add arr into t.grad. own=True marks arr as freshly allocated and safe
    to adopt without copying."""
    if t.grad is None:
        t.grad = arr if own else arr.copy()
    else:
        t.grad += arr


def ensure_grad(t: Tensor) -> np.ndarray:
    if t.grad is None:
        t.grad = np.zeros_like(t.data)
    return t.grad
