"""Split concatenated host names into words with a ranked unigram lexicon.

Onion addresses are often vanity strings like ``drugmarketxyz123``. The
splitter runs a dynamic program over each alphanumeric run, charging an
in-lexicon word ``w`` the cost ``ln(rank(w) * ln(L))`` (``rank`` is its
1-based position in the frequency-ranked lexicon of size ``L``) and any
unrecognized chunk a flat 10 per character. The cheapest split wins;
ties prefer fewer words, then the lexicographically smaller word list,
which keeps unrecognized chunks maximal.
"""

from __future__ import annotations

import math
import re
from pathlib import Path

_ALNUM_RUN = re.compile(r"[a-z0-9]+")
_UNKNOWN_CHAR_COST = 10.0


def load_lexicon(path) -> list[str]:
    """One word per line, most frequent first. Blank lines are skipped."""
    words = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        word = line.strip().lower()
        if word:
            words.append(word)
    return words


def build_rank_index(lexicon) -> dict[str, int]:
    """Map each lexicon word to its 1-based rank (first occurrence wins)."""
    ranks: dict[str, int] = {}
    for i, word in enumerate(lexicon):
        ranks.setdefault(word, i + 1)
    return ranks


def segment_address(address: str, lexicon) -> list[str]:
    """Best-cost segmentation of an address into words and leftover chunks.

    A trailing ".onion" label is ignored and non-alphanumeric characters
    act as hard boundaries. The returned list mixes recognized words and
    unrecognized chunks; filter with the lexicon to keep readable words.
    """
    if not address:
        return []
    ranks = build_rank_index(lexicon)
    if len(ranks) < 2:
        raise ValueError("lexicon must contain at least two distinct words")
    text = address.strip().lower()
    if text.endswith(".onion"):
        text = text[: -len(".onion")]
    log_l = math.log(len(ranks))
    out: list[str] = []
    for run in _ALNUM_RUN.findall(text):
        out.extend(_segment_run(run, ranks, log_l))
    return out


def _segment_run(run: str, ranks: dict[str, int], log_l: float) -> list[str]:
    n = len(run)
    # best[i] = (cost, word count, words) for run[:i]
    best: list[tuple[float, int, tuple[str, ...]] | None] = [None] * (n + 1)
    best[0] = (0.0, 0, ())
    for end in range(1, n + 1):
        for start in range(end):
            prev = best[start]
            if prev is None:
                continue
            word = run[start:end]
            rank = ranks.get(word)
            if rank is not None:
                cost = math.log(rank * log_l)
            else:
                cost = _UNKNOWN_CHAR_COST * len(word)
            cand = (prev[0] + cost, prev[1] + 1, prev[2] + (word,))
            if best[end] is None or cand < best[end]:
                best[end] = cand
    final = best[n]
    assert final is not None
    return list(final[2])


def readable_words(segments, lexicon) -> list[str]:
    """Keep only the segments that are actual lexicon words."""
    vocab = set(lexicon)
    return [w for w in segments if w in vocab]
