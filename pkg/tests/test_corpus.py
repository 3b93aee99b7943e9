import json

import numpy as np
import pytest

from histnorm.corpus import (
    Dataset,
    DatasetFormatError,
    TokenPair,
    compute_stats,
    load_dataset,
    make_dataset,
    save_dataset,
    stats_json,
    subset_tokens,
)


def write(tmp_path, text, name="data.tsv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadDataset:
    def test_parses_pairs_in_order(self, tmp_path):
        path = write(tmp_path, "sayed\tsaid\nthee\tthe\n")
        ds = load_dataset(path)
        assert ds.pairs == (TokenPair("sayed", "said"), TokenPair("thee", "the"))

    def test_lowercase_casefolds_both_fields(self, tmp_path):
        path = write(tmp_path, "Said\tSaid\n")
        ds = load_dataset(path, lowercase=True)
        assert ds.pairs == (TokenPair("said", "said"),)

    def test_space_instead_of_tab_is_error_with_line_number(self, tmp_path):
        path = write(tmp_path, "sayed said\n")
        with pytest.raises(DatasetFormatError) as exc:
            load_dataset(path)
        assert exc.value.lineno == 1

    def test_error_names_later_line(self, tmp_path):
        path = write(tmp_path, "a\tb\nc\td\nbroken line\n")
        with pytest.raises(DatasetFormatError) as exc:
            load_dataset(path)
        assert exc.value.lineno == 3

    def test_empty_field_is_error(self, tmp_path):
        path = write(tmp_path, "sayed\t\n")
        with pytest.raises(DatasetFormatError):
            load_dataset(path)

    def test_too_many_fields_is_error(self, tmp_path):
        path = write(tmp_path, "a\tb\tc\n")
        with pytest.raises(DatasetFormatError):
            load_dataset(path)

    def test_missing_final_newline_ok(self, tmp_path):
        path = write(tmp_path, "a\tb")
        assert len(load_dataset(path)) == 1

    def test_unicode_casefold(self, tmp_path):
        path = write(tmp_path, "STRASSE\tStraße\n")
        ds = load_dataset(path, lowercase=True)
        assert ds.pairs[0].modern == "strasse"


class TestRoundTrip:
    def test_save_then_load_identical(self, tmp_path):
        rng = np.random.default_rng(11)
        alphabet = list("abcéþ")  # includes non-ASCII
        pairs = []
        for _ in range(200):
            h = "".join(rng.choice(alphabet, size=rng.integers(1, 9)))
            m = "".join(rng.choice(alphabet, size=rng.integers(1, 9)))
            pairs.append((h, m))
        ds = make_dataset(pairs)
        path = tmp_path / "round.tsv"
        save_dataset(ds, path)
        again = load_dataset(path)
        assert again.pairs == ds.pairs


class TestComputeStats:
    def test_hand_counted_fixture(self, tiny_train, tiny_eval):
        stats = compute_stats(tiny_train, tiny_eval)
        assert stats.token_count == 3
        assert stats.hist_types == 2
        assert stats.modern_types == 2
        assert stats.pct_no_change == pytest.approx(2 / 3)
        assert stats.pct_unseen == pytest.approx(1 / 2)

    def test_empty_train_is_error(self, tiny_eval):
        empty = Dataset(name="e", split="train", pairs=())
        with pytest.raises(ValueError):
            compute_stats(empty, tiny_eval)

    def test_unseen_of_train_against_itself_is_zero(self, tiny_train):
        assert compute_stats(tiny_train, tiny_train).pct_unseen == 0.0

    def test_permutation_invariant(self, tiny_train, tiny_eval):
        rng = np.random.default_rng(5)
        perm = list(tiny_train.pairs)
        rng.shuffle(perm)
        shuffled = Dataset(name="s", split="train", pairs=tuple(perm))
        a = compute_stats(tiny_train, tiny_eval)
        b = compute_stats(shuffled, tiny_eval)
        assert a == b

    def test_type_counts_bounded_by_tokens(self):
        rng = np.random.default_rng(3)
        pairs = [("w%d" % rng.integers(5), "m%d" % rng.integers(5)) for _ in range(50)]
        ds = make_dataset(pairs)
        stats = compute_stats(ds, ds)
        assert stats.hist_types <= stats.token_count
        assert stats.modern_types <= stats.token_count
        assert 0.0 <= stats.pct_no_change <= 1.0


class TestSubsetTokens:
    def test_full_size_is_identity(self, tiny_train):
        assert subset_tokens(tiny_train, 3).pairs == tiny_train.pairs

    def test_prefix_of_one(self, tiny_train):
        assert subset_tokens(tiny_train, 1).pairs == (TokenPair("a", "a"),)

    def test_prefix_of_two(self, tiny_train):
        assert subset_tokens(tiny_train, 2).pairs == (TokenPair("a", "a"), TokenPair("b", "c"))

    def test_out_of_range_is_error(self, tiny_train):
        with pytest.raises(ValueError):
            subset_tokens(tiny_train, 0)
        with pytest.raises(ValueError):
            subset_tokens(tiny_train, 4)


REFERENCE_STATS = {
    # language: (train tokens in k, hist types in 0.1k, modern types in 0.1k, %nc, %uns-of-dev)
    "english": (148, 194, 106, 73.9, 8.6),
    "german": (39, 90, 84, 84.8, 14.8),
}


@pytest.mark.skipif("HISTNORM_DATA_DIR" not in __import__("os").environ, reason="licensed datasets not provided")
@pytest.mark.parametrize("lang", sorted(REFERENCE_STATS))
def test_real_dataset_statistics_match_reference(lang):
    import os
    from pathlib import Path

    data_dir = Path(os.environ["HISTNORM_DATA_DIR"])
    train_path = data_dir / f"{lang}.train.tsv"
    dev_path = data_dir / f"{lang}.dev.tsv"
    if not train_path.exists() or not dev_path.exists():
        pytest.skip(f"{lang} files not present")
    stats = compute_stats(load_dataset(train_path), load_dataset(dev_path, split="dev"))
    tokens_k, hist_01k, modern_01k, pct_nc, pct_uns = REFERENCE_STATS[lang]
    assert round(stats.token_count / 1000) == tokens_k
    assert round(stats.hist_types / 100) == hist_01k
    assert round(stats.modern_types / 100) == modern_01k
    assert 100 * stats.pct_no_change == pytest.approx(pct_nc, abs=0.05)
    assert 100 * stats.pct_unseen == pytest.approx(pct_uns, abs=0.05)


def test_stats_json_has_contract_keys(tiny_train, tiny_eval):
    line = stats_json(compute_stats(tiny_train, tiny_eval), name="fixture", eval_tokens=2)
    obj = json.loads(line)
    for key in ("tokens", "hist_types", "modern_types", "pct_no_change", "pct_unseen"):
        assert key in obj
