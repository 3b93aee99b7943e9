"""Shared encoder-decoder plumbing for the two normalization models."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from histnorm.models.config import ModelConfig
from histnorm.models.layers import BiEncoder
from histnorm.models.vocab import CharVocab
from histnorm.numerics import Parameter, Tensor, ops


@dataclass(frozen=True)
class DecodeResult:
    output: str
    truncated: bool = False


class EncoderDecoderBase:
    kind = "base"

    def __init__(self, config: ModelConfig, vocab: CharVocab, rng: np.random.Generator):
        self.config = config
        self.vocab = vocab
        self.emb = Parameter(0.1 * rng.standard_normal((vocab.size, config.emb_dim)), "emb")
        self.encoder = BiEncoder(rng, config.emb_dim, config.enc_dim)

    def encode(self, h: str) -> list[Tensor]:
        """Contextual state per position of BEGIN + chars(h) + END (|h|+2 total)."""
        embedded = [ops.embedding_lookup(self.emb, i) for i in self.vocab.input_ids(h)]
        return self.encoder.encode(embedded)

    def parameters(self) -> list[Parameter]:
        raise NotImplementedError


def greedy_pick(logits: Tensor, masked: list[int]) -> int:
    z = logits.data.copy()
    z[masked] = -np.inf
    return int(np.argmax(z))
