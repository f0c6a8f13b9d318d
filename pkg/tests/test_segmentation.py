import math
import random

import pytest

from onionrank.segmentation import build_rank_index, load_lexicon, readable_words, segment_address

LEXICON = ["market", "drug", "rug", "a", "ma", "ket", "dr"]


def oracle_segment(run: str, lexicon) -> list[str]:
    """Exhaustive search over all 2^(n-1) split points with the same cost model."""
    ranks = build_rank_index(lexicon)
    log_l = math.log(len(ranks))

    def cost(word):
        if word in ranks:
            return math.log(ranks[word] * log_l)
        return 10.0 * len(word)

    best = None
    n = len(run)
    for mask in range(1 << max(0, n - 1)):
        cuts = [0] + [i + 1 for i in range(n - 1) if mask >> i & 1] + [n]
        words = tuple(run[cuts[i] : cuts[i + 1]] for i in range(len(cuts) - 1))
        key = (sum(cost(w) for w in words), len(words), words)
        if best is None or key < best:
            best = key
    return list(best[2])


def test_drugmarket_splits():
    assert segment_address("drugmarket", LEXICON) == ["drug", "market"]


def test_single_lexicon_word():
    assert segment_address("a", LEXICON) == ["a"]


def test_unsegmentable_kept_whole():
    segments = segment_address("zzzzzz", LEXICON)
    assert segments == ["zzzzzz"]
    assert readable_words(segments, LEXICON) == []


def test_empty_address():
    assert segment_address("", LEXICON) == []


def test_onion_suffix_and_boundaries():
    assert segment_address("drug-market.onion", LEXICON) == ["drug", "market"]


def test_matches_exhaustive_oracle():
    rng = random.Random(11)
    alphabet = "drugmakets"
    for _ in range(60):
        run = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 9)))
        assert segment_address(run, LEXICON) == oracle_segment(run, LEXICON)


def test_prefers_fewer_words_on_cost_ties():
    # both unknown splits of "zzzz" cost 40; the whole chunk must win
    assert segment_address("zzzz", LEXICON) == ["zzzz"]


def test_lexicon_loader(tmp_path):
    path = tmp_path / "lex.txt"
    path.write_text("The\nof\n\nand\n", encoding="utf-8")
    assert load_lexicon(path) == ["the", "of", "and"]


def test_tiny_lexicon_rejected():
    with pytest.raises(ValueError):
        segment_address("abc", ["only"])


def test_exhaustive_oracle_with_other_lexicon():
    lexicon = ["shop", "book", "hop", "s", "okays"]
    rng = random.Random(5)
    for _ in range(40):
        run = "".join(rng.choice("shopbokay") for _ in range(rng.randint(2, 8)))
        assert segment_address(run, lexicon) == oracle_segment(run, lexicon)
