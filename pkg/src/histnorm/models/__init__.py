"""Neural normalizers: soft-attention and hard monotonic-attention
character encoder-decoders, training, decoding, serialization."""

from histnorm.models.base import DecodeResult
from histnorm.models.config import MODEL_KINDS, ModelConfig
from histnorm.models.hard import HardAttentionModel, oracle_target_ids
from histnorm.models.serialize import (
    ModelFormatError,
    ModelVersionError,
    NotAModelFileError,
    TruncatedModelError,
    load_model,
    save_model,
)
from histnorm.models.soft import SoftAttentionModel
from histnorm.models.training import ModelNormalizer, TrainingError, TrainLog, build_model, train
from histnorm.models.vocab import BEGIN, END, STEP_ID, STOP_ID, UNK, CharVocab

__all__ = [
    "ModelConfig",
    "MODEL_KINDS",
    "CharVocab",
    "BEGIN",
    "END",
    "UNK",
    "STEP_ID",
    "STOP_ID",
    "SoftAttentionModel",
    "HardAttentionModel",
    "oracle_target_ids",
    "DecodeResult",
    "train",
    "build_model",
    "TrainLog",
    "TrainingError",
    "ModelNormalizer",
    "save_model",
    "load_model",
    "ModelFormatError",
    "NotAModelFileError",
    "ModelVersionError",
    "TruncatedModelError",
]
