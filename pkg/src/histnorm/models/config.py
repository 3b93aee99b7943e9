"""Model hyperparameters.

The defaults (embedding 100, encoder 100 per direction, decoder 200, one
recurrent layer, Adam with lr 1e-3 and global-norm clipping at 5) are our
own fixed choices; nothing here is tuned per dataset.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

MODEL_KINDS = ("soft", "hard")


@dataclass(frozen=True)
class ModelConfig:
    kind: str
    emb_dim: int = 100
    enc_dim: int = 100  # per direction
    dec_dim: int = 200
    epochs: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"model kind must be one of {MODEL_KINDS}, got {self.kind!r}")
        for field in ("emb_dim", "enc_dim", "dec_dim"):
            if getattr(self, field) < 1:
                raise ValueError(f"{field} must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        return cls(**d)
