"""Soft-attention encoder-decoder.

The decoder LSTM consumes the previous output character embedding together
with the previous attention context (input feeding); a bilinear score
against every encoder position gives the attention weights, and the output
layer reads the decoder state concatenated with the fresh context.
"""

from __future__ import annotations

import numpy as np

from histnorm.models.base import DecodeResult, EncoderDecoderBase, greedy_pick
from histnorm.models.config import ModelConfig
from histnorm.models.layers import Linear, LSTMCell, glorot
from histnorm.models.vocab import BEGIN, END, STEP_ID, STOP_ID, UNK, CharVocab
from histnorm.numerics import Parameter, Tensor, ops

# reserved symbols a soft decoder must never emit
_DECODE_MASK = [BEGIN, END, UNK, STEP_ID]


def default_max_len(h: str) -> int:
    return 2 * len(h) + 10


class SoftAttentionModel(EncoderDecoderBase):
    kind = "soft"

    def __init__(self, config: ModelConfig, vocab: CharVocab, rng: np.random.Generator):
        super().__init__(config, vocab, rng)
        ctx_dim = self.encoder.out_dim
        self.dec = LSTMCell(rng, config.emb_dim + ctx_dim, config.dec_dim, "dec")
        self.att = Parameter(glorot(rng, (config.dec_dim, ctx_dim)), "att.A")
        self.out = Linear(rng, config.dec_dim + ctx_dim, vocab.size, "out")

    def parameters(self) -> list[Parameter]:
        return (
            [self.emb]
            + self.encoder.parameters()
            + self.dec.parameters()
            + [self.att]
            + self.out.parameters()
        )

    def soft_attend(self, state: Tensor, enc_mat: Tensor) -> tuple[Tensor, Tensor]:
        """Attention weights over all encoder positions and their weighted sum."""
        return ops.attend(state, enc_mat, self.att)

    def _step(self, prev_id: int, ctx: Tensor, s: Tensor, c: Tensor, enc_mat: Tensor):
        x = ops.concat([ops.embedding_lookup(self.emb, prev_id), ctx])
        s, c = self.dec.step(x, s, c)
        _, ctx = self.soft_attend(s, enc_mat)
        logits = self.out(ops.concat([s, ctx]))
        return logits, ctx, s, c

    def loss(self, h: str, m: str) -> Tensor:
        """Teacher-forced cross-entropy of m given h, summed over characters
        plus the final STOP."""
        enc_mat = ops.stack(self.encode(h))
        m_ids = [self.vocab.encode_char(ch) for ch in m]
        s, c = self.dec.initial()
        ctx = Tensor(np.zeros(self.encoder.out_dim))
        total: Tensor | None = None
        prev = BEGIN
        for target in m_ids + [STOP_ID]:
            logits, ctx, s, c = self._step(prev, ctx, s, c, enc_mat)
            step_loss = ops.cross_entropy_loss(logits, target)
            total = step_loss if total is None else ops.add(total, step_loss)
            prev = target
        return total

    def decode(self, h: str, max_len: int | None = None) -> DecodeResult:
        """Greedy decoding from BEGIN until STOP or the length cap."""
        if max_len is None:
            max_len = default_max_len(h)
        enc_mat = ops.stack(self.encode(h))
        s, c = self.dec.initial()
        ctx = Tensor(np.zeros(self.encoder.out_dim))
        written: list[str] = []
        prev = BEGIN
        for _ in range(max_len):
            logits, ctx, s, c = self._step(prev, ctx, s, c, enc_mat)
            choice = greedy_pick(logits, _DECODE_MASK)
            if choice == STOP_ID:
                return DecodeResult("".join(written), truncated=False)
            written.append(self.vocab.decode(choice))
            prev = choice
        return DecodeResult("".join(written), truncated=True)
