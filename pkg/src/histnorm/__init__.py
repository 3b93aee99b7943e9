"""Historical spelling normalization toolkit.

Normalizes historical wordforms to modern spellings with a frequency
memorization baseline and two character-level encoder-decoders (soft
attention, hard monotonic attention), and evaluates them the honest way:
accuracy split into seen and unseen tokens, comparison against the
baseline, hybrid routing, learning curves, and an external-tagger
downstream check.
"""

__version__ = "0.1.0"

from histnorm.corpus import Dataset, TokenPair, compute_stats, load_dataset, subset_tokens
from histnorm.baseline import BaselineNormalizer, Lexicon, build_lexicon

__all__ = [
    "Dataset",
    "TokenPair",
    "load_dataset",
    "compute_stats",
    "subset_tokens",
    "Lexicon",
    "build_lexicon",
    "BaselineNormalizer",
    "__version__",
]
