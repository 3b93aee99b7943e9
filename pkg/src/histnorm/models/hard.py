"""Hard monotonic-attention encoder-decoder.

The decoder attends to exactly one encoder position. The pointer starts on
the first source character (just past the BEGIN sentinel) and only explicit
STEP actions advance it, one position at a time; after consuming all |h|
characters it rests on the END sentinel, where STEP is masked out. Training
maximizes the likelihood of the oracle write/advance action sequence.
"""

from __future__ import annotations

import numpy as np

from histnorm.alignment import ActionSequence, STEP, WRITE
from histnorm.models.base import DecodeResult, EncoderDecoderBase, greedy_pick
from histnorm.models.config import ModelConfig
from histnorm.models.layers import Linear, LSTMCell
from histnorm.models.vocab import BEGIN, END, STEP_ID, STOP_ID, UNK, CharVocab
from histnorm.numerics import Parameter, Tensor, ops

_ALWAYS_MASKED = [BEGIN, END, UNK]


def oracle_target_ids(vocab: CharVocab, actions: ActionSequence) -> list[int]:
    """Vocabulary ids of an oracle action sequence, in order."""
    ids = []
    for a in actions.actions:
        if a.kind == WRITE:
            ids.append(vocab.encode_char(a.char))
        elif a.kind == STEP:
            ids.append(STEP_ID)
        else:
            ids.append(STOP_ID)
    return ids


class HardAttentionModel(EncoderDecoderBase):
    kind = "hard"

    def __init__(self, config: ModelConfig, vocab: CharVocab, rng: np.random.Generator):
        super().__init__(config, vocab, rng)
        self.dec = LSTMCell(rng, config.emb_dim + self.encoder.out_dim, config.dec_dim, "dec")
        self.out = Linear(rng, config.dec_dim, vocab.size, "out")

    def parameters(self) -> list[Parameter]:
        return [self.emb] + self.encoder.parameters() + self.dec.parameters() + self.out.parameters()

    def loss(self, h: str, target_ids: list[int]) -> Tensor:
        """Teacher-forced cross-entropy over the oracle action ids."""
        enc = self.encode(h)
        last = len(enc) - 1
        ptr = min(1, last)
        s, c = self.dec.initial()
        total: Tensor | None = None
        prev = BEGIN
        for target in target_ids:
            x = ops.concat([ops.embedding_lookup(self.emb, prev), enc[ptr]])
            s, c = self.dec.step(x, s, c)
            step_loss = ops.cross_entropy_loss(self.out(s), target)
            total = step_loss if total is None else ops.add(total, step_loss)
            if target == STEP_ID and ptr < last:
                ptr += 1
            prev = target
        if total is None:
            raise ValueError("empty action sequence")
        return total

    def force_actions(self, h: str, action_ids: list[int]) -> str:
        """Play a fixed action sequence through the decoder (no argmax) and
        return the written string; pointer mechanics are identical to decode."""
        enc = self.encode(h)
        last = len(enc) - 1
        ptr = min(1, last)
        s, c = self.dec.initial()
        written: list[str] = []
        prev = BEGIN
        for action in action_ids:
            x = ops.concat([ops.embedding_lookup(self.emb, prev), enc[ptr]])
            s, c = self.dec.step(x, s, c)
            if action == STOP_ID:
                break
            if action == STEP_ID:
                ptr = min(ptr + 1, last)
            elif self.vocab.is_char(action):
                written.append(self.vocab.decode(action))
            prev = action
        return "".join(written)

    def decode(self, h: str) -> DecodeResult:
        """Greedy action decoding; the write budget 2|h|+10 guards untrained
        models against never emitting STOP."""
        enc = self.encode(h)
        last = len(enc) - 1
        ptr = min(1, last)
        s, c = self.dec.initial()
        written: list[str] = []
        max_writes = 2 * len(h) + 10
        prev = BEGIN
        while True:
            x = ops.concat([ops.embedding_lookup(self.emb, prev), enc[ptr]])
            s, c = self.dec.step(x, s, c)
            logits = self.out(s)
            masked = _ALWAYS_MASKED + [STEP_ID] if ptr >= last else _ALWAYS_MASKED
            choice = greedy_pick(logits, masked)
            if choice == STOP_ID:
                return DecodeResult("".join(written), truncated=False)
            if choice == STEP_ID:
                ptr += 1
            else:
                if len(written) >= max_writes:
                    return DecodeResult("".join(written), truncated=True)
                written.append(self.vocab.decode(choice))
            prev = choice
