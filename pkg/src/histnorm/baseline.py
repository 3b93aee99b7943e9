"""Naive memorization baseline.

Each historical form maps to the modern form it was most often paired with
in training; ties go to the earliest observed pairing; forms never seen in
training pass through unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

from histnorm.corpus import Dataset


@dataclass
class LexEntry:
    modern: str
    count: int
    first_seen: int  # corpus position of the first (hist, modern) occurrence


class Lexicon:
    """Frequency-ranked hist -> modern map built from a training Dataset."""

    def __init__(self):
        self._entries: dict[str, dict[str, LexEntry]] = {}
        self._best: dict[str, str] = {}

    def add(self, hist: str, modern: str, position: int) -> None:
        forms = self._entries.setdefault(hist, {})
        entry = forms.get(modern)
        if entry is None:
            forms[modern] = LexEntry(modern, 1, position)
        else:
            entry.count += 1

    def finalize(self) -> None:
        # Tie-break: highest count first, then earliest first observation.
        self._best = {
            hist: min(forms.values(), key=lambda e: (-e.count, e.first_seen)).modern
            for hist, forms in self._entries.items()
        }

    def is_seen(self, hist: str) -> bool:
        return hist in self._entries

    def normalize(self, hist: str) -> str:
        return self._best.get(hist, hist)

    def entries(self, hist: str) -> list[LexEntry]:
        return sorted(self._entries.get(hist, {}).values(), key=lambda e: e.first_seen)

    def __len__(self) -> int:
        return len(self._entries)

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for hist in sorted(self._entries):
                for e in self.entries(hist):
                    f.write(f"{hist}\t{e.modern}\t{e.count}\t{e.first_seen}\n")

    @classmethod
    def load(cls, path) -> "Lexicon":
        lex = cls()
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                fields = line.rstrip("\n").split("\t")
                if len(fields) != 4:
                    raise ValueError(f"{path}:{lineno}: expected 4 fields, got {len(fields)}")
                hist, modern, count, first_seen = fields
                lex._entries.setdefault(hist, {})[modern] = LexEntry(
                    modern, int(count), int(first_seen)
                )
        lex.finalize()
        return lex


def build_lexicon(train: Dataset) -> Lexicon:
    if len(train) == 0:
        raise ValueError("cannot build a lexicon from an empty dataset")
    lex = Lexicon()
    for position, pair in enumerate(train.pairs):
        lex.add(pair.hist, pair.modern, position)
    lex.finalize()
    return lex


def baseline_normalize(lex: Lexicon, hist: str) -> str:
    return lex.normalize(hist)


def is_seen(lex: Lexicon, hist: str) -> bool:
    return lex.is_seen(hist)


class BaselineNormalizer:
    """Normalizer interface wrapper around a Lexicon."""

    def __init__(self, lexicon: Lexicon, name: str = "baseline"):
        self.lexicon = lexicon
        self.name = name

    def normalize(self, token: str) -> str:
        return self.lexicon.normalize(token)
