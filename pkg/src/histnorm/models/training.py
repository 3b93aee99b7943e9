"""Training loop: per-token updates, seeded epoch shuffles, final-epoch
model (no early stopping, development sets unused)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from histnorm.alignment import oracle_actions
from histnorm.corpus import Dataset
from histnorm.models.base import DecodeResult
from histnorm.models.config import ModelConfig
from histnorm.models.hard import HardAttentionModel, oracle_target_ids
from histnorm.models.soft import SoftAttentionModel
from histnorm.models.vocab import CharVocab
from histnorm.numerics import Optimizer, Tape


class TrainingError(RuntimeError):
    def __init__(self, epoch: int, pair_index: int, message: str):
        super().__init__(f"epoch {epoch}, pair {pair_index}: {message}")
        self.epoch = epoch
        self.pair_index = pair_index


@dataclass
class TrainLog:
    epoch_losses: list[float] = field(default_factory=list)


def build_model(config: ModelConfig, vocab: CharVocab, rng: np.random.Generator):
    if config.kind == "soft":
        return SoftAttentionModel(config, vocab, rng)
    return HardAttentionModel(config, vocab, rng)


def train(config: ModelConfig, train_data: Dataset, on_epoch=None):
    """Train a model of config.kind on train_data.

    Returns (model, TrainLog). All randomness (parameter init, per-epoch
    shuffles) flows from config.seed, so identical inputs give identical
    parameters. on_epoch, if given, is called with (epoch, mean_loss) after
    each epoch.
    """
    if len(train_data) == 0:
        raise ValueError("cannot train on an empty dataset")
    rng = np.random.default_rng(config.seed)
    vocab = CharVocab.from_dataset(train_data)
    model = build_model(config, vocab, rng)

    pairs = train_data.pairs
    if config.kind == "hard":
        # oracle actions depend only on the pair; align once, reuse every epoch
        targets = [oracle_target_ids(vocab, oracle_actions(p.hist, p.modern)) for p in pairs]
    else:
        targets = None

    optimizer = Optimizer(model.parameters(), kind="adam", lr=1e-3, clip_norm=5.0)
    order = np.arange(len(pairs))
    log = TrainLog()
    for epoch in range(config.epochs):
        rng.shuffle(order)
        total = 0.0
        for idx in order:
            pair = pairs[idx]
            with Tape() as tape:
                if targets is None:
                    loss = model.loss(pair.hist, pair.modern)
                else:
                    loss = model.loss(pair.hist, targets[idx])
            value = loss.item()
            if not math.isfinite(value):
                raise TrainingError(epoch, int(idx), f"non-finite loss {value!r}")
            tape.backward(loss)
            optimizer.step()
            total += value
        mean = total / len(pairs)
        log.epoch_losses.append(mean)
        if on_epoch is not None:
            on_epoch(epoch, mean)
    return model, log


class ModelNormalizer:
    """Normalizer interface wrapper around a trained model."""

    def __init__(self, model, name: str | None = None):
        self.model = model
        self.name = name or model.kind

    def normalize(self, token: str) -> str:
        return self.model.decode(token).output

    def decode(self, token: str) -> DecodeResult:
        return self.model.decode(token)
