import numpy as np
import pytest

from histnorm.corpus import Dataset, TokenPair, make_dataset


@pytest.fixture
def tiny_train():
    return make_dataset([("a", "a"), ("b", "c"), ("a", "a")], name="fixture", split="train")


@pytest.fixture
def tiny_eval():
    return make_dataset([("a", "x"), ("d", "d")], name="fixture", split="dev")


def random_pairs(rng: np.random.Generator, n: int, alphabet: str = "abcde", max_len: int = 8):
    pairs = []
    for _ in range(n):
        h = "".join(rng.choice(list(alphabet), size=rng.integers(1, max_len + 1)))
        m = "".join(rng.choice(list(alphabet), size=rng.integers(1, max_len + 1)))
        pairs.append(TokenPair(h, m))
    return pairs


def dataset_from(pairs, name="data", split="train") -> Dataset:
    return Dataset(name=name, split=split, pairs=tuple(pairs))
