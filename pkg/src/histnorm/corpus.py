"""Token-pair datasets: loading, statistics, and training-size subsets.

A dataset file is UTF-8 text with LF line endings, one pair per line as
``hist<TAB>modern``, no header and no comments. Corpus order is preserved
everywhere: tie-breaking in the baseline and "first k tokens" subsetting
both depend on it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

SPLITS = ("train", "dev", "test")


class TokenPair(NamedTuple):
    hist: str
    modern: str


class DatasetFormatError(ValueError):
    """Raised for malformed dataset files; carries the offending line number."""

    def __init__(self, path, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno


@dataclass(frozen=True)
class Dataset:
    name: str
    split: str
    pairs: tuple[TokenPair, ...]

    def __post_init__(self):
        if self.split not in SPLITS:
            raise ValueError(f"split must be one of {SPLITS}, got {self.split!r}")

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[TokenPair]:
        return iter(self.pairs)


@dataclass(frozen=True)
class DatasetStats:
    token_count: int
    hist_types: int
    modern_types: int
    pct_no_change: float
    pct_unseen: float

    def to_json_dict(self) -> dict:
        return {
            "tokens": self.token_count,
            "hist_types": self.hist_types,
            "modern_types": self.modern_types,
            "pct_no_change": self.pct_no_change,
            "pct_unseen": self.pct_unseen,
        }


def make_dataset(pairs: Iterable[tuple[str, str]], name: str = "data", split: str = "train") -> Dataset:
    """Build a Dataset from (hist, modern) tuples, validating the field invariants."""
    out = []
    for i, (h, m) in enumerate(pairs):
        _check_field(h, "hist", i)
        _check_field(m, "modern", i)
        out.append(TokenPair(h, m))
    return Dataset(name=name, split=split, pairs=tuple(out))


def _check_field(value: str, which: str, index: int) -> None:
    if not value:
        raise ValueError(f"pair {index}: empty {which} field")
    if "\t" in value or "\n" in value:
        raise ValueError(f"pair {index}: {which} field contains tab or newline")


def load_dataset(path, lowercase: bool = False, name: str | None = None, split: str = "train") -> Dataset:
    """Load a ``hist<TAB>modern`` file, preserving corpus order.

    With lowercase=True both fields are case-folded (full Unicode folding).
    """
    pairs = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if line.endswith("\n"):
                line = line[:-1]
            if line.endswith("\r"):
                line = line[:-1]
            fields = line.split("\t")
            if len(fields) != 2:
                raise DatasetFormatError(
                    path, lineno, f"expected 2 tab-separated fields, got {len(fields)}"
                )
            hist, modern = fields
            if not hist or not modern:
                raise DatasetFormatError(path, lineno, "empty field")
            if lowercase:
                hist, modern = hist.casefold(), modern.casefold()
            pairs.append(TokenPair(hist, modern))
    return Dataset(name=name or str(path), split=split, pairs=tuple(pairs))


def save_dataset(dataset: Dataset, path) -> None:
    """Write a Dataset back to the file format (round-trips with load_dataset)."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for pair in dataset.pairs:
            f.write(f"{pair.hist}\t{pair.modern}\n")


def compute_stats(train: Dataset, eval: Dataset) -> DatasetStats:
    """Dataset statistics: type counts and no-change rate over the training
    set, plus the fraction of eval tokens whose historical form never occurs
    in training.
    """
    if len(train) == 0:
        raise ValueError("compute_stats: empty training dataset")
    hist_forms = {p.hist for p in train.pairs}
    modern_forms = {p.modern for p in train.pairs}
    no_change = sum(1 for p in train.pairs if p.hist == p.modern)
    if len(eval) == 0:
        pct_unseen = 0.0
    else:
        unseen = sum(1 for p in eval.pairs if p.hist not in hist_forms)
        pct_unseen = unseen / len(eval)
    return DatasetStats(
        token_count=len(train),
        hist_types=len(hist_forms),
        modern_types=len(modern_forms),
        pct_no_change=no_change / len(train),
        pct_unseen=pct_unseen,
    )


def subset_tokens(train: Dataset, k: int) -> Dataset:
    """First k pairs in corpus order. Deterministic: no shuffling."""
    if not 1 <= k <= len(train):
        raise ValueError(f"subset size {k} out of range 1..{len(train)}")
    return Dataset(name=f"{train.name}[:{k}]", split=train.split, pairs=train.pairs[:k])


def stats_json(stats: DatasetStats, name: str | None = None, eval_tokens: int | None = None) -> str:
    """One JSON object (single line) for the stats CLI output."""
    obj: dict = {}
    if name is not None:
        obj["name"] = name
    obj.update(stats.to_json_dict())
    if eval_tokens is not None:
        obj["eval_tokens"] = eval_tokens
    return json.dumps(obj, ensure_ascii=False)
