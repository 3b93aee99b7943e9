"""Character vocabulary shared by both models.

Indices 0..4 are reserved for the BEGIN/END sentinels, the UNK character,
and the STEP/STOP action symbols; real characters follow in first-occurrence
order over the training pairs (historical form first, then modern form),
which makes the vocabulary deterministic and serialization-stable.
"""

from __future__ import annotations

from typing import Iterable

from histnorm.corpus import Dataset

BEGIN, END, UNK, STEP_ID, STOP_ID = range(5)
NUM_RESERVED = 5
RESERVED_NAMES = ("<s>", "</s>", "<unk>", "<step>", "<stop>")


class CharVocab:
    def __init__(self, chars: Iterable[str]):
        self.chars: list[str] = []
        self._index: dict[str, int] = {}
        for ch in chars:
            if len(ch) != 1:
                raise ValueError(f"vocabulary entries must be single characters, got {ch!r}")
            if ch not in self._index:
                self._index[ch] = NUM_RESERVED + len(self.chars)
                self.chars.append(ch)

    @classmethod
    def from_dataset(cls, train: Dataset) -> "CharVocab":
        def gen():
            for pair in train.pairs:
                yield from pair.hist
                yield from pair.modern

        return cls(gen())

    @property
    def size(self) -> int:
        return NUM_RESERVED + len(self.chars)

    def encode_char(self, ch: str) -> int:
        return self._index.get(ch, UNK)

    def decode(self, idx: int) -> str:
        if idx < NUM_RESERVED:
            raise ValueError(f"index {idx} is the reserved symbol {RESERVED_NAMES[idx]}")
        return self.chars[idx - NUM_RESERVED]

    def is_char(self, idx: int) -> bool:
        return NUM_RESERVED <= idx < self.size

    def __contains__(self, ch: str) -> bool:
        return ch in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, CharVocab) and self.chars == other.chars

    def input_ids(self, text: str) -> list[int]:
        """BEGIN + character ids (UNK for out-of-vocabulary) + END."""
        return [BEGIN] + [self.encode_char(c) for c in text] + [END]
