"""Synthetic fixtures.

The real normalization corpora are licensed, so the test and demo data are
generated: random wordforms paired with the output of two deterministic
rewrite rules (word-final "e" is dropped; "v" between two vowels becomes
"u"). Both rules read their context from the input string, then apply
together, so e.g. "ave" -> "au".
"""

from __future__ import annotations

import argparse

import numpy as np

from histnorm.corpus import Dataset, TokenPair, save_dataset

VOWELS = "aeiou"
CONSONANTS = "bcdfglmnprstv"


def apply_rules(word: str) -> str:
    out = []
    n = len(word)
    for i, ch in enumerate(word):
        if ch == "v" and 0 < i < n - 1 and word[i - 1] in VOWELS and word[i + 1] in VOWELS:
            out.append("u")
        elif ch == "e" and i == n - 1 and n > 1:
            continue
        else:
            out.append(ch)
    return "".join(out)


def _sample_word(rng: np.random.Generator, min_len: int, max_len: int) -> str:
    n = int(rng.integers(min_len, max_len + 1))
    chars = []
    for i in range(n):
        if rng.random() < 0.48:
            chars.append(VOWELS[int(rng.integers(len(VOWELS)))])
        elif rng.random() < 0.22:
            chars.append("v")
        else:
            chars.append(CONSONANTS[int(rng.integers(len(CONSONANTS)))])
    if rng.random() < 0.35:
        chars[-1] = "e"
    return "".join(chars)


def make_rule_corpus(
    n_train: int,
    n_test: int,
    seed: int = 0,
    min_len: int = 3,
    max_len: int = 9,
) -> tuple[Dataset, Dataset]:
    """Training pairs plus a test set whose historical forms never occur in
    training (every test token is unseen)."""
    rng = np.random.default_rng(seed)
    train_pairs = []
    train_hists = set()
    for _ in range(n_train):
        w = _sample_word(rng, min_len, max_len)
        train_pairs.append(TokenPair(w, apply_rules(w)))
        train_hists.add(w)
    test_pairs = []
    while len(test_pairs) < n_test:
        w = _sample_word(rng, min_len, max_len)
        if w in train_hists:
            continue
        test_pairs.append(TokenPair(w, apply_rules(w)))
    return (
        Dataset(name="rule-lang", split="train", pairs=tuple(train_pairs)),
        Dataset(name="rule-lang", split="test", pairs=tuple(test_pairs)),
    )


def make_identity_corpus(
    n_train: int,
    n_test: int,
    seed: int = 0,
    min_len: int = 3,
    max_len: int = 9,
) -> tuple[Dataset, Dataset]:
    """Random strings with h = m everywhere; the oracle is the identity."""
    rng = np.random.default_rng(seed)
    def pairs(n):
        return tuple(TokenPair(w, w) for w in (_sample_word(rng, min_len, max_len) for _ in range(n)))
    return (
        Dataset(name="identity", split="train", pairs=pairs(n_train)),
        Dataset(name="identity", split="test", pairs=pairs(n_test)),
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Write synthetic rule-language train/test files (hist<TAB>modern)."
    )
    parser.add_argument("--train-size", type=int, default=2000)
    parser.add_argument("--test-size", type=int, default=500)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--train-out", default="train.tsv")
    parser.add_argument("--test-out", default="test.tsv")
    args = parser.parse_args(argv)
    train, test = make_rule_corpus(args.train_size, args.test_size, seed=args.seed)
    save_dataset(train, args.train_out)
    save_dataset(test, args.test_out)
    print(f"wrote {len(train)} train pairs to {args.train_out}, {len(test)} test pairs to {args.test_out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
