"""Reverse-mode tape.

Ops executed inside a `with Tape():` block append their backward closures
in execution order; backward() replays them in exact reverse order. A tape
belongs to one thread (thread-local active slot) and can run backward only
once.
"""

from __future__ import annotations

import threading

import numpy as np

from histnorm.numerics.tensor import Tensor

_STATE = threading.local()


class TapeReusedError(RuntimeError):
    pass


class Tape:
    def __init__(self):
        self._nodes: list = []
        self._scratch: dict = {}
        self._finalizers: dict = {}
        self._done = False

    def __enter__(self) -> "Tape":
        if getattr(_STATE, "tape", None) is not None:
            raise RuntimeError("a tape is already recording on this thread")
        _STATE.tape = self
        return self

    def __exit__(self, *exc) -> None:
        _STATE.tape = None

    def record(self, backward_fn) -> None:
        self._nodes.append(backward_fn)

    def scratch(self, key, factory=list):
        """Per-tape buffer shared by all ops that use the same key. Ops that
        touch one parameter many times per pass (recurrent cells) batch their
        weight-gradient contributions here."""
        try:
            return self._scratch[key]
        except KeyError:
            value = factory()
            self._scratch[key] = value
            return value

    def defer(self, key, flush_fn) -> None:
        """Register a finalizer (once per key) that runs after the reverse
        sweep; used to flush batched parameter-gradient contributions.
        Only valid for leaf tensors: nothing may read those grads mid-sweep."""
        if key not in self._finalizers:
            self._finalizers[key] = flush_fn

    def __len__(self) -> int:
        return len(self._nodes)

    def backward(self, loss: Tensor) -> None:
        """Fill gradients of everything that contributed to the scalar loss."""
        if self._done:
            raise TapeReusedError("backward already ran on this tape; record a new forward pass")
        if loss.data.shape != ():
            raise ValueError(f"backward expects a scalar loss, got shape {loss.data.shape}")
        self._done = True
        loss.grad = np.ones((), dtype=np.float64)
        for fn in reversed(self._nodes):
            fn()
        for fn in self._finalizers.values():
            fn()


def active_tape() -> Tape | None:
    return getattr(_STATE, "tape", None)
