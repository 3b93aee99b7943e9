"""Recurrent and linear building blocks on top of the numerics ops."""

from __future__ import annotations

import numpy as np

from histnorm.numerics import Parameter, Tensor, ops


def glorot(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    limit = np.sqrt(6.0 / sum(shape))
    return rng.uniform(-limit, limit, size=shape)


class LSTMCell:
    """One recurrent direction: weights plus the fused step op."""

    def __init__(self, rng: np.random.Generator, in_dim: int, hidden_dim: int, name: str):
        self.in_dim = in_dim
        self.hidden_dim = hidden_dim
        b = np.zeros(4 * hidden_dim)
        b[hidden_dim : 2 * hidden_dim] = 1.0  # forget-gate bias keeps early training stable
        self.W = Parameter(glorot(rng, (in_dim, 4 * hidden_dim)), f"{name}.W")
        self.U = Parameter(glorot(rng, (hidden_dim, 4 * hidden_dim)), f"{name}.U")
        self.b = Parameter(b, f"{name}.b")

    def initial(self) -> tuple[Tensor, Tensor]:
        z = np.zeros(self.hidden_dim)
        return Tensor(z), Tensor(z.copy())

    def step(self, x: Tensor, h: Tensor, c: Tensor) -> tuple[Tensor, Tensor]:
        return ops.lstm_cell(x, h, c, self.W, self.U, self.b)

    def parameters(self) -> list[Parameter]:
        return [self.W, self.U, self.b]


class Linear:
    def __init__(self, rng: np.random.Generator, in_dim: int, out_dim: int, name: str):
        self.W = Parameter(glorot(rng, (in_dim, out_dim)), f"{name}.W")
        self.b = Parameter(np.zeros(out_dim), f"{name}.b")

    def __call__(self, x: Tensor) -> Tensor:
        return ops.add(ops.matmul(x, self.W), self.b)

    def parameters(self) -> list[Parameter]:
        return [self.W, self.b]


class BiEncoder:
    """Bi-directional LSTM over BEGIN + chars + END.

    Position i carries the forward state after reading positions <= i
    concatenated with the backward state after reading positions >= i.
    """

    def __init__(self, rng: np.random.Generator, emb_dim: int, enc_dim: int):
        self.fw = LSTMCell(rng, emb_dim, enc_dim, "enc_fw")
        self.bw = LSTMCell(rng, emb_dim, enc_dim, "enc_bw")

    @property
    def out_dim(self) -> int:
        return 2 * self.fw.hidden_dim

    def encode(self, embedded: list[Tensor]) -> list[Tensor]:
        n = len(embedded)
        h, c = self.fw.initial()
        fw_states = []
        for i in range(n):
            h, c = self.fw.step(embedded[i], h, c)
            fw_states.append(h)
        h, c = self.bw.initial()
        bw_states: list[Tensor | None] = [None] * n
        for i in range(n - 1, -1, -1):
            h, c = self.bw.step(embedded[i], h, c)
            bw_states[i] = h
        return [ops.concat([fw_states[i], bw_states[i]]) for i in range(n)]

    def parameters(self) -> list[Parameter]:
        return self.fw.parameters() + self.bw.parameters()
