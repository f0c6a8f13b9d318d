"""Corpus-level tf-idf vectorization over domain texts.

Tokens are lowercase alphanumeric runs. The vocabulary keeps the
``vocab_size`` terms of highest document frequency among terms seen in
at least ``min_df`` documents, ordered by descending document frequency
with lexicographic tie-breaks. A document's weight for term ``t`` is
``tf(t, d) * (ln((1 + n) / (1 + df(t))) + 1)`` and the document vector
is L2-normalized.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field

from .errors import ConfigError

_TOKEN = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric runs, in order of appearance."""
    return _TOKEN.findall(text.lower())


@dataclass(frozen=True)
class TfIdfModel:
    """Fitted vocabulary with document frequencies."""

    vocabulary: tuple[str, ...]
    document_frequency: dict[str, int]
    n_documents: int
    _idf: dict[str, float] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        if not self._idf:
            idf = {
                t: math.log((1 + self.n_documents) / (1 + self.document_frequency[t])) + 1.0
                for t in self.vocabulary
            }
            object.__setattr__(self, "_idf", idf)

    def __contains__(self, term: str) -> bool:
        return term in self._idf

    def idf(self, term: str) -> float:
        return self._idf[term]

    def document_weights(self, tokens) -> dict[str, float]:
        """Normalized tf-idf weights of one document, restricted to the vocabulary.

        Returns an empty mapping when no token is in the vocabulary.
        """
        counts = Counter(t for t in tokens if t in self._idf)
        if not counts:
            return {}
        raw = {t: c * self._idf[t] for t, c in counts.items()}
        norm = math.sqrt(sum(w * w for w in raw.values()))
        if norm == 0.0:
            return {t: 0.0 for t in raw}
        return {t: w / norm for t, w in raw.items()}

    @classmethod
    def fit(cls, documents, vocab_size: int = 10_000, min_df: int = 3) -> "TfIdfModel":
        """Fit from an iterable of texts (or pre-tokenized token lists)."""
        docs = [tokenize(d) if isinstance(d, str) else list(d) for d in documents]
        if not docs:
            raise ConfigError("cannot fit tf-idf on an empty corpus")
        df: Counter[str] = Counter()
        for tokens in docs:
            df.update(set(tokens))
        eligible = [t for t, c in df.items() if c >= min_df]
        eligible.sort(key=lambda t: (-df[t], t))
        vocab = tuple(eligible[:vocab_size])
        return cls(
            vocabulary=vocab,
            document_frequency={t: df[t] for t in vocab},
            n_documents=len(docs),
        )


def build_tfidf_model(corpus, vocab_size: int = 10_000, min_df: int = 3, landing_only: bool = False) -> TfIdfModel:
    """Fit the tf-idf model over a corpus, one document per domain."""
    return TfIdfModel.fit(
        (domain.text(landing_only) for domain in corpus),
        vocab_size=vocab_size,
        min_df=min_df,
    )
