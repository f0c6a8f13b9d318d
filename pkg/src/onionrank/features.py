"""The 40-dimensional per-domain feature vector.

Five groups, in fixed column order: text (9), named entities (10), HTML
markup (8), visual content (6), and graph position (7). Extractors are
pure functions of their declared inputs, so the same corpus and
configuration always produce the same matrix.
"""

from __future__ import annotations

import hashlib
import re
from collections import Counter
from dataclasses import dataclass, replace
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

from . import segmentation
from .corpus import Corpus, Domain, LinkGraph, derive_link_graph, href_host, is_relative_href, normalize_host
from .errors import ConfigError, DataFormatError
from .graphalg import CentralityResult, RankingResult, centralities, kshell, torank
from .tfidf import TfIdfModel, build_tfidf_model, tokenize

TEXT_FEATURES = (
    "recently_updated",
    "updates_count",
    "address_words_count",
    "address_letters_count",
    "clones_rate",
    "keyword_num",
    "keyword_TF-IDF",
    "keyword_avg_weight",
    "keyword_to_total",
)
NER_FEATURES = (
    "popular_NE_PER",
    "popular_NE_LOC",
    "popular_NE_ORG",
    "popular_NE_PRD",
    "popular_NE_CRTV",
    "popular_NE_GRP",
    "NE_counter",
    "NE_TF-IDF",
    "popular_NE_TF-IDF",
    "emerging_NE",
)
HTML_FEATURES = (
    "internal_links",
    "external_links",
    "img_count",
    "needs_credential",
    "has_title",
    "has_H1",
    "TF-IDF_title_H1",
    "TF-IDF_alt",
)
VISUAL_FEATURES = (
    "suspicious_count",
    "noise_count",
    "total_count",
    "avg_suspicious_conf",
    "avg_normal_conf",
    "suspicious_majority",
)
GRAPH_FEATURES = (
    "in_degree",
    "out_degree",
    "cls",
    "btwn",
    "eigvec",
    "ToRank_rank",
    "ToRank_top_X",
)

GROUP_ORDER = ("text", "ner", "html", "visual", "graph")
FEATURE_GROUPS = {
    "text": TEXT_FEATURES,
    "ner": NER_FEATURES,
    "html": HTML_FEATURES,
    "visual": VISUAL_FEATURES,
    "graph": GRAPH_FEATURES,
}
FEATURE_NAMES = TEXT_FEATURES + NER_FEATURES + HTML_FEATURES + VISUAL_FEATURES + GRAPH_FEATURES

NE_CATEGORIES = ("PER", "LOC", "ORG", "PRD", "CRTV", "GRP")


@dataclass(frozen=True)
class FeatureConfig:
    """Knobs of the extraction pipeline.

    ``reference_date`` anchors the recency window; when unset it resolves
    to the latest scrape time in the corpus. ``invert_keyword_ratio``
    flips keyword_to_total to keywords/total for the alternative reading
    of that ratio.
    """

    reference_date: datetime | None = None
    recency_days: int = 90
    vocab_size: int = 10_000
    min_df: int = 3
    popularity_threshold: int = 5
    top_x: int = 10
    landing_only: bool = False
    invert_keyword_ratio: bool = False

    def recency_threshold(self) -> datetime:
        if self.reference_date is None:
            raise ConfigError("reference_date is required to compute recency")
        return self.reference_date - timedelta(days=self.recency_days)


# Date shapes recognized in visible text. Ambiguous d/m/y is tried
# day-first, then month-first if the day-first reading is invalid.
_ISO_DATE = re.compile(
    r"\b(\d{4})-(\d{2})-(\d{2})(?:[T ](\d{2}):(\d{2})(?::(\d{2}))?)?\b"
)
_SLASH_DATE = re.compile(r"\b(\d{1,2})/(\d{1,2})/(\d{4})\b")
_MONTHS = {
    name: i + 1
    for i, name in enumerate(
        "january february march april may june july august september october november december".split()
    )
}
_MONTHS.update({name[:3]: num for name, num in list(_MONTHS.items())})
_NAME_DATE = re.compile(
    r"\b(" + "|".join(sorted(_MONTHS, key=len, reverse=True)) + r")\s+(\d{1,2}),?\s+(\d{4})\b",
    re.IGNORECASE,
)


def parse_timestamps(text: str) -> set[datetime]:
    """All distinct timestamps recognized in the text; date-only forms map to midnight."""
    found: set[datetime] = set()
    for m in _ISO_DATE.finditer(text):
        year, month, day = int(m.group(1)), int(m.group(2)), int(m.group(3))
        hour = int(m.group(4) or 0)
        minute = int(m.group(5) or 0)
        second = int(m.group(6) or 0)
        try:
            found.add(datetime(year, month, day, hour, minute, second))
        except ValueError:
            continue
    for m in _SLASH_DATE.finditer(text):
        a, b, year = int(m.group(1)), int(m.group(2)), int(m.group(3))
        stamp = None
        try:
            stamp = datetime(year, b, a)  # day/month/year first
        except ValueError:
            try:
                stamp = datetime(year, a, b)
            except ValueError:
                pass
        if stamp is not None:
            found.add(stamp)
    for m in _NAME_DATE.finditer(text):
        month = _MONTHS[m.group(1).lower()]
        try:
            found.add(datetime(int(m.group(3)), month, int(m.group(2))))
        except ValueError:
            continue
    return found


def clone_hash(text: str) -> str:
    """MD5 fingerprint of lowercased, whitespace-collapsed text (not a security boundary)."""
    normalized = " ".join(text.lower().split())
    return hashlib.md5(normalized.encode("utf-8")).hexdigest()


def build_clone_index(corpus: Corpus, landing_only: bool = False) -> dict[str, int]:
    """Fingerprint occurrence counts over the whole corpus."""
    counts: Counter[str] = Counter()
    for domain in corpus:
        counts[clone_hash(domain.text(landing_only))] += 1
    return dict(counts)


def extract_text_features(
    domain: Domain,
    tfidf: TfIdfModel,
    clone_index: dict[str, int],
    lexicon,
    config: FeatureConfig,
) -> list[float]:
    text = domain.text(config.landing_only)
    stamps = parse_timestamps(text)
    threshold = config.recency_threshold()
    recently_updated = 1.0 if any(s >= threshold for s in stamps) else 0.0
    updates_count = float(len(stamps))

    segments = segmentation.segment_address(domain.address, lexicon)
    words = segmentation.readable_words(segments, lexicon)
    address_words_count = float(len(words))
    address_letters_count = float(sum(len(w) for w in words))

    clones_rate = float(clone_index.get(clone_hash(text), 1))

    tokens = tokenize(text)
    weights = tfidf.document_weights(tokens)
    keywords = {t for t in set(tokens) if t in tfidf}
    keyword_num = float(len(keywords))
    keyword_tfidf = sum(weights.get(t, 0.0) for t in sorted(keywords))
    keyword_avg = keyword_tfidf / keyword_num if keyword_num else 0.0
    if keyword_num:
        ratio = keyword_num / len(tokens) if config.invert_keyword_ratio else len(tokens) / keyword_num
    else:
        ratio = 0.0

    return [
        recently_updated,
        updates_count,
        address_words_count,
        address_letters_count,
        clones_rate,
        keyword_num,
        keyword_tfidf,
        keyword_avg,
        ratio,
    ]


def load_gazetteer(path) -> dict[str, str]:
    """Read the surface-form -> category TSV. COR folds into ORG."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"gazetteer file {path} not found")
    gazetteer: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DataFormatError(f"{path} line {lineno}: expected 'surface<TAB>category'")
        surface, category = parts[0].strip().lower(), parts[1].strip().upper()
        if category == "COR":
            category = "ORG"
        if category not in NE_CATEGORIES:
            raise DataFormatError(f"{path} line {lineno}: unknown category {category!r}")
        gazetteer[surface] = category
    return gazetteer


class GazetteerNER:
    """Dictionary NER: case-insensitive longest-match scan at word boundaries."""

    def __init__(self, gazetteer: dict[str, str]):
        self.category_of = {s.lower(): c for s, c in gazetteer.items()}
        if self.category_of:
            surfaces = sorted(self.category_of, key=len, reverse=True)
            pattern = r"\b(?:" + "|".join(re.escape(s) for s in surfaces) + r")\b"
            self._pattern = re.compile(pattern)
        else:
            self._pattern = None

    def mentions(self, text: str) -> Counter:
        """Count of each detected surface form in the text."""
        if self._pattern is None:
            return Counter()
        return Counter(self._pattern.findall(text.lower()))


def build_emerging_index(mentions_by_domain: dict[str, Counter], ner: GazetteerNER) -> frozenset[str]:
    """Product entities sitting in the minimum shell of the co-occurrence graph.

    Two product entities are linked when some domain mentions both; the
    entities of the lowest k-shell are the emerging ones.
    """
    prd = {
        s
        for mentions in mentions_by_domain.values()
        for s in mentions
        if ner.category_of.get(s) == "PRD"
    }
    if not prd:
        return frozenset()
    edges = set()
    for mentions in mentions_by_domain.values():
        present = sorted(s for s in mentions if s in prd)
        for i, a in enumerate(present):
            for b in present[i + 1 :]:
                edges.add((a, b))
    shells = kshell(prd, edges)
    minimum = min(shells.values())
    return frozenset(s for s, k in shells.items() if k == minimum)


def extract_ne_features(
    domain: Domain,
    ner: GazetteerNER,
    tfidf: TfIdfModel,
    popularity_threshold: int = 5,
    emerging_entities: frozenset[str] = frozenset(),
    config: FeatureConfig | None = None,
    mentions: Counter | None = None,
) -> list[float]:
    cfg = config or FeatureConfig()
    if mentions is None:
        mentions = ner.mentions(domain.text(cfg.landing_only))
    popular = {s for s, c in mentions.items() if c >= popularity_threshold}
    flags = []
    for category in NE_CATEGORIES:
        flags.append(1.0 if any(ner.category_of[s] == category for s in popular) else 0.0)
    ne_counter = float(sum(mentions.values()))

    weights = tfidf.document_weights(tokenize(domain.text(cfg.landing_only)))
    all_tokens = {t for s in mentions for t in tokenize(s)}
    popular_tokens = {t for s in popular for t in tokenize(s)}
    ne_tfidf = sum(weights.get(t, 0.0) for t in sorted(all_tokens) if t in tfidf)
    popular_tfidf = sum(weights.get(t, 0.0) for t in sorted(popular_tokens) if t in tfidf)

    emerging = float(sum(c for s, c in mentions.items() if s in emerging_entities))
    return flags + [ne_counter, ne_tfidf, popular_tfidf, emerging]


def extract_html_features(
    domain: Domain,
    tfidf: TfIdfModel,
    config: FeatureConfig | None = None,
) -> list[float]:
    cfg = config or FeatureConfig()
    scans = domain.scans(cfg.landing_only)
    own_host = normalize_host(domain.address)
    hrefs = {href for scan in scans for href, _ in scan.hyperlinks}
    internal = external = 0
    for href in hrefs:
        host = href_host(href)
        if host is not None:
            if host == own_host:
                internal += 1
            else:
                external += 1
        elif is_relative_href(href):
            internal += 1
    img_count = sum(scan.img_count for scan in scans)
    needs_credential = 1.0 if any(scan.needs_credential for scan in scans) else 0.0
    has_title = 1.0 if any(scan.has_title for scan in scans) else 0.0
    has_h1 = 1.0 if any(scan.has_h1 for scan in scans) else 0.0

    weights = tfidf.document_weights(tokenize(domain.text(cfg.landing_only)))
    title_h1_tokens = {t for scan in scans for t in tokenize(scan.title_h1_text())}
    alt_tokens = {t for scan in scans for alt in scan.alt_texts for t in tokenize(alt)}
    title_h1_tfidf = sum(weights.get(t, 0.0) for t in sorted(title_h1_tokens))
    alt_tfidf = sum(weights.get(t, 0.0) for t in sorted(alt_tokens))

    return [
        float(internal),
        float(external),
        float(img_count),
        needs_credential,
        has_title,
        has_h1,
        title_h1_tfidf,
        alt_tfidf,
    ]


def extract_visual_features(domain: Domain, records) -> list[float]:
    records = list(records or [])
    suspicious = [r for r in records if r.suspicious]
    noise = [r for r in records if not r.suspicious]
    avg_susp = sum(r.confidence for r in suspicious) / len(suspicious) if suspicious else 0.0
    avg_norm = sum(r.confidence for r in noise) / len(noise) if noise else 0.0
    return [
        float(len(suspicious)),
        float(len(noise)),
        float(len(records)),
        avg_susp,
        avg_norm,
        1.0 if len(suspicious) > len(noise) else 0.0,
    ]


def extract_graph_features(
    domain_id: str,
    graph: LinkGraph,
    centrality: CentralityResult,
    torank_result: RankingResult,
    top_x: int = 10,
) -> list[float]:
    if domain_id not in graph.nodes:
        return [0.0] * len(GRAPH_FEATURES)
    in_degree = sum(1 for _, dst in graph.edges if dst == domain_id)
    out_degree = sum(1 for src, _ in graph.edges if src == domain_id)
    rank = torank_result.rank_of(domain_id)
    return [
        float(in_degree),
        float(out_degree),
        centrality.closeness[domain_id],
        centrality.betweenness[domain_id],
        centrality.eigenvector[domain_id],
        float(rank),
        1.0 if rank <= top_x else 0.0,
    ]


@dataclass(frozen=True)
class StandardizationStats:
    """Per-column mean and population standard deviation, fitted on training rows."""

    mean: np.ndarray
    std: np.ndarray

    def to_jsonable(self) -> dict:
        return {"mean": [float(x) for x in self.mean], "std": [float(x) for x in self.std]}

    @classmethod
    def from_jsonable(cls, data: dict) -> "StandardizationStats":
        return cls(mean=np.asarray(data["mean"], dtype=float), std=np.asarray(data["std"], dtype=float))


@dataclass(frozen=True)
class FeatureMatrix:
    """Rows of per-domain features with their column names."""

    domain_ids: tuple[str, ...]
    names: tuple[str, ...]
    values: np.ndarray

    def row(self, domain_id: str) -> np.ndarray:
        return self.values[self.domain_ids.index(domain_id)]

    def feature_dict(self, domain_id: str) -> dict[str, float]:
        return dict(zip(self.names, (float(x) for x in self.row(domain_id))))

    def write_csv(self, path) -> None:
        lines = ["domain_id," + ",".join(self.names)]
        for did, row in zip(self.domain_ids, self.values):
            lines.append(did + "," + ",".join(f"{x:.17g}" for x in row))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")

    @classmethod
    def read_csv(cls, path) -> "FeatureMatrix":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        if not lines:
            raise DataFormatError(f"{path} is empty")
        header = lines[0].split(",")
        if header[:1] != ["domain_id"]:
            raise DataFormatError(f"{path}: first column must be domain_id")
        names = tuple(header[1:])
        ids = []
        rows = []
        for line in lines[1:]:
            if not line:
                continue
            cells = line.split(",")
            if len(cells) != len(names) + 1:
                raise DataFormatError(f"{path}: row width mismatch")
            ids.append(cells[0])
            rows.append([float(c) for c in cells[1:]])
        return cls(domain_ids=tuple(ids), names=names, values=np.asarray(rows, dtype=float))


def resolve_groups(groups) -> list[str]:
    """Normalize a group selection to canonical order; 'all' means all five."""
    if groups in (None, "all"):
        selected = set(GROUP_ORDER)
    elif isinstance(groups, str):
        selected = {g.strip() for g in groups.split(",") if g.strip()}
    else:
        selected = set(groups)
    if "all" in selected:
        selected = set(GROUP_ORDER)
    unknown = selected - set(GROUP_ORDER)
    if unknown:
        raise ConfigError(f"unknown feature group(s): {', '.join(sorted(unknown))}")
    if not selected:
        raise ConfigError("at least one feature group must be selected")
    return [g for g in GROUP_ORDER if g in selected]


def assemble_feature_matrix(
    corpus: Corpus,
    groups="all",
    gazetteer: dict[str, str] | None = None,
    lexicon=None,
    visual_records: dict | None = None,
    graph: LinkGraph | None = None,
    config: FeatureConfig | None = None,
) -> FeatureMatrix:
    """One feature row per domain, columns restricted to the selected groups.

    Corpus-global models (tf-idf, clone index, entity co-occurrence,
    centralities, removal ranking) are computed once and shared by the
    per-domain extractors, and only for the groups that need them.
    """
    if not len(corpus):
        raise ConfigError("cannot extract features from an empty corpus")
    selected = resolve_groups(groups)
    cfg = config or FeatureConfig()
    if cfg.reference_date is None and "text" in selected:
        cfg = replace(cfg, reference_date=max(d.scrape_time for d in corpus))

    tfidf = None
    if {"text", "ner", "html"} & set(selected):
        tfidf = build_tfidf_model(corpus, cfg.vocab_size, cfg.min_df, cfg.landing_only)

    clone_index = build_clone_index(corpus, cfg.landing_only) if "text" in selected else {}
    if "text" in selected and lexicon is None:
        raise ConfigError("text features require a unigram lexicon")

    ner = None
    mentions_by_domain: dict[str, Counter] = {}
    emerging: frozenset[str] = frozenset()
    if "ner" in selected:
        if gazetteer is None:
            raise ConfigError("ner features require a gazetteer")
        ner = GazetteerNER(gazetteer)
        for domain in corpus:
            mentions_by_domain[domain.domain_id] = ner.mentions(domain.text(cfg.landing_only))
        emerging = build_emerging_index(mentions_by_domain, ner)

    centrality = None
    torank_result = None
    if "graph" in selected:
        if graph is None:
            graph = derive_link_graph(corpus)
        centrality = centralities(graph)
        torank_result = torank(graph)

    visual_records = visual_records or {}

    rows = []
    for domain in corpus:
        row: list[float] = []
        if "text" in selected:
            row.extend(extract_text_features(domain, tfidf, clone_index, lexicon, cfg))
        if "ner" in selected:
            row.extend(
                extract_ne_features(
                    domain,
                    ner,
                    tfidf,
                    cfg.popularity_threshold,
                    emerging,
                    cfg,
                    mentions=mentions_by_domain[domain.domain_id],
                )
            )
        if "html" in selected:
            row.extend(extract_html_features(domain, tfidf, cfg))
        if "visual" in selected:
            row.extend(extract_visual_features(domain, visual_records.get(domain.domain_id, [])))
        if "graph" in selected:
            row.extend(extract_graph_features(domain.domain_id, graph, centrality, torank_result, cfg.top_x))
        rows.append(row)

    names = tuple(name for g in selected for name in FEATURE_GROUPS[g])
    return FeatureMatrix(
        domain_ids=tuple(corpus.domain_ids()),
        names=names,
        values=np.asarray(rows, dtype=float),
    )


def standardize(
    matrix: FeatureMatrix, stats: StandardizationStats | None = None
) -> tuple[FeatureMatrix, StandardizationStats]:
    """Center and scale columns to unit variance; constant columns map to zero.

    Without ``stats`` the matrix is treated as a training split and the
    statistics are fitted from it; with ``stats`` they are applied
    unchanged (validation and test splits).
    """
    values = matrix.values
    if stats is None:
        mean = values.mean(axis=0)
        std = values.std(axis=0)  # population standard deviation
        stats = StandardizationStats(mean=mean, std=std)
    if stats.mean.shape[0] != values.shape[1]:
        raise ConfigError(
            f"standardization stats cover {stats.mean.shape[0]} columns, matrix has {values.shape[1]}"
        )
    safe = np.where(stats.std == 0.0, 1.0, stats.std)
    out = (values - stats.mean) / safe
    out[:, stats.std == 0.0] = 0.0
    return (
        FeatureMatrix(domain_ids=matrix.domain_ids, names=matrix.names, values=out),
        stats,
    )
