"""Corpus loading, the domain-level link graph, and sidecar files.

A corpus on disk is one subdirectory per domain::

    <root>/<domain_id>/meta.json          {"address": ..., "scrape_time": RFC-3339}
    <root>/<domain_id>/pages/<page_id>.html

Ingestion parses every page once (see :mod:`onionrank.markup`), keeps
domains sorted by id, and reports skipped pages and failed domains on
standard error. The resulting :class:`Corpus` is immutable and safe to
share across threads.
"""

from __future__ import annotations

import json
import logging
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from urllib.parse import urlsplit

from .errors import CorpusError, DataFormatError
from .markup import PageScan, scan_html

log = logging.getLogger(__name__)

# The nine image-classifier categories; every class but "Others" flags
# potentially illicit content.
VISUAL_CATEGORIES = (
    "Counterfeit Credit Cards",
    "Counterfeit Money",
    "Counterfeit Personal Identification",
    "Cryptocurrency",
    "Drugs",
    "Pornography",
    "Violence",
    "Hacking",
    "Others",
)
SUSPICIOUS_CATEGORIES = frozenset(c for c in VISUAL_CATEGORIES if c != "Others")


def normalize_host(value: str) -> str:
    """Canonical host form: no scheme, port, path, or leading "www.", lowercased."""
    value = value.strip()
    if "://" in value:
        value = value.split("://", 1)[1]
    elif value.startswith("//"):
        value = value[2:]
    for sep in ("/", "?", "#"):
        value = value.split(sep, 1)[0]
    if "@" in value:
        value = value.rsplit("@", 1)[1]
    value = value.rsplit(":", 1)[0] if _has_port(value) else value
    value = value.lower()
    if value.startswith("www."):
        value = value[4:]
    return value


def _has_port(netloc: str) -> bool:
    if ":" not in netloc:
        return False
    tail = netloc.rsplit(":", 1)[1]
    return tail.isdigit()


def href_host(href: str) -> str | None:
    """Host of an absolute href, normalized; None for relative or unusable hrefs."""
    try:
        parts = urlsplit(href.strip())
    except ValueError:
        return None
    if parts.netloc:
        host = normalize_host(parts.netloc)
        return host or None
    return None


def is_relative_href(href: str) -> bool:
    """True for hrefs with no scheme and no host (same-site references)."""
    try:
        parts = urlsplit(href.strip())
    except ValueError:
        return False
    return not parts.scheme and not parts.netloc


@dataclass(frozen=True)
class PageDocument:
    """One scraped page: raw bytes plus everything derived from them."""

    page_id: str
    raw_html: bytes
    visible_text: str
    hyperlinks: tuple[tuple[str, str], ...]
    scan: PageScan = field(repr=False, compare=False, default_factory=PageScan)


@dataclass(frozen=True)
class Domain:
    """A scraped onion domain and its pages, ordered by page id."""

    domain_id: str
    address: str
    pages: tuple[PageDocument, ...]
    scrape_time: datetime

    def text(self, landing_only: bool = False) -> str:
        """Domain-level visible text: pages joined by newlines in page_id order."""
        pages = self.pages[:1] if landing_only else self.pages
        return "\n".join(p.visible_text for p in pages)

    def scans(self, landing_only: bool = False) -> tuple[PageScan, ...]:
        pages = self.pages[:1] if landing_only else self.pages
        return tuple(p.scan for p in pages)


@dataclass(frozen=True)
class LinkGraph:
    """Directed domain-level hyperlink graph, deduplicated, no self-loops."""

    nodes: frozenset[str]
    edges: frozenset[tuple[str, str]]

    def induced(self, keep) -> "LinkGraph":
        """Subgraph induced by the given node set."""
        keep = frozenset(keep) & self.nodes
        return LinkGraph(keep, frozenset(e for e in self.edges if e[0] in keep and e[1] in keep))


@dataclass(frozen=True)
class VisualRecord:
    """One precomputed image-classification record for a domain."""

    domain_id: str
    image_ref: str
    category: str
    confidence: float
    suspicious: bool


@dataclass
class IngestReport:
    n_domains: int = 0
    n_pages: int = 0
    skipped_pages: list[tuple[str, str, str]] = field(default_factory=list)
    failed_domains: list[tuple[str, str]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def summary(self) -> str:
        lines = [f"ingest: {self.n_domains} domains, {self.n_pages} pages"]
        for domain_id, reason in self.failed_domains:
            lines.append(f"ingest: domain {domain_id} failed: {reason}")
        for domain_id, page, reason in self.skipped_pages:
            lines.append(f"ingest: skipped page {domain_id}/{page}: {reason}")
        lines.extend(f"ingest: {w}" for w in self.warnings)
        return "\n".join(lines)


@dataclass(frozen=True)
class Corpus:
    """Immutable set of ingested domains, sorted by domain id."""

    domains: tuple[Domain, ...]
    report: IngestReport = field(compare=False, default_factory=IngestReport)

    def __len__(self) -> int:
        return len(self.domains)

    def __iter__(self):
        return iter(self.domains)

    def domain_ids(self) -> list[str]:
        return [d.domain_id for d in self.domains]

    def get(self, domain_id: str) -> Domain:
        for d in self.domains:
            if d.domain_id == domain_id:
                return d
        raise KeyError(domain_id)

    def serialize(self) -> str:
        """Stable JSON rendering used to check ingest determinism."""
        payload = [
            {
                "domain_id": d.domain_id,
                "address": d.address,
                "scrape_time": d.scrape_time.isoformat(),
                "pages": [
                    {
                        "page_id": p.page_id,
                        "visible_text": p.visible_text,
                        "hyperlinks": [list(h) for h in p.hyperlinks],
                    }
                    for p in d.pages
                ],
            }
            for d in self.domains
        ]
        return json.dumps(payload, sort_keys=True, ensure_ascii=False)


def parse_rfc3339(value: str) -> datetime:
    """Parse an RFC-3339 timestamp into a naive UTC datetime."""
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        stamp = datetime.fromisoformat(text)
    except ValueError as exc:
        raise DataFormatError(f"bad timestamp {value!r}: {exc}") from exc
    if stamp.tzinfo is not None:
        stamp = stamp.astimezone(timezone.utc).replace(tzinfo=None)
    return stamp


def ingest_corpus(root_path, emit_report: bool = True) -> Corpus:
    """Load every domain under ``root_path``.

    Unreadable or unparsable pages are skipped with a warning; a domain
    with no usable pages or a missing/broken meta file is reported as
    failed and omitted. Two runs over the same tree produce identical
    corpora.
    """
    root = Path(root_path)
    if not root.is_dir():
        raise CorpusError(f"corpus root {root} is not a directory")
    report = IngestReport()
    domains: list[Domain] = []
    subdirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not subdirs:
        report.warnings.append(f"empty corpus root {root}")
    for ddir in subdirs:
        domain_id = ddir.name
        meta_path = ddir / "meta.json"
        try:
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
            address = str(meta["address"])
            scrape_time = parse_rfc3339(str(meta["scrape_time"]))
            if not address:
                raise DataFormatError("empty address")
        except (OSError, ValueError, KeyError, DataFormatError) as exc:
            report.failed_domains.append((domain_id, f"meta.json: {exc}"))
            continue
        pages: list[PageDocument] = []
        pages_dir = ddir / "pages"
        page_files = sorted(pages_dir.glob("*.html")) if pages_dir.is_dir() else []
        for page_file in page_files:
            page_id = page_file.stem
            try:
                raw = page_file.read_bytes()
                scan = scan_html(raw.decode("utf-8", errors="replace"))
            except Exception as exc:  # parser failures must not kill the domain
                report.skipped_pages.append((domain_id, page_file.name, str(exc)))
                continue
            pages.append(
                PageDocument(
                    page_id=page_id,
                    raw_html=raw,
                    visible_text=scan.visible_text,
                    hyperlinks=scan.hyperlinks,
                    scan=scan,
                )
            )
        if not pages:
            report.failed_domains.append((domain_id, "no readable pages"))
            continue
        domains.append(
            Domain(
                domain_id=domain_id,
                address=address,
                pages=tuple(sorted(pages, key=lambda p: p.page_id)),
                scrape_time=scrape_time,
            )
        )
        report.n_domains += 1
        report.n_pages += len(pages)
    corpus = Corpus(domains=tuple(domains), report=report)
    if emit_report:
        print(report.summary(), file=sys.stderr)
    return corpus


def derive_link_graph(corpus: Corpus) -> LinkGraph:
    """Domain-level graph: edge (A, B) when a page of A links to B's host.

    Hrefs whose host does not belong to the corpus are dropped, as are
    self-loops; duplicate edges collapse.
    """
    by_host: dict[str, str] = {}
    for domain in corpus:
        host = normalize_host(domain.address)
        if host in by_host and by_host[host] != domain.domain_id:
            log.warning("duplicate address %s for %s and %s", host, by_host[host], domain.domain_id)
            continue
        by_host[host] = domain.domain_id
    edges: set[tuple[str, str]] = set()
    for domain in corpus:
        for page in domain.pages:
            for href, _anchor in page.hyperlinks:
                host = href_host(href)
                if host is None:
                    continue
                target = by_host.get(host)
                if target is not None and target != domain.domain_id:
                    edges.add((domain.domain_id, target))
    return LinkGraph(nodes=frozenset(corpus.domain_ids()), edges=frozenset(edges))


def load_visual_records(path, domain_ids=None) -> dict[str, list[VisualRecord]]:
    """Read the newline-delimited JSON sidecar of image-classification records.

    Records with an unknown category or a confidence outside [0, 1] are
    rejected and logged. Domains listed in ``domain_ids`` but absent from
    the file map to empty lists.
    """
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"visual sidecar {path} not found")
    records: dict[str, list[VisualRecord]] = {}
    if domain_ids is not None:
        for did in domain_ids:
            records[did] = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            raw = json.loads(line)
            domain_id = str(raw["domain_id"])
            image_ref = str(raw["image_ref"])
            category = str(raw["category"])
            confidence = float(raw["confidence"])
        except (ValueError, KeyError, TypeError) as exc:
            log.error("visual sidecar %s line %d rejected: %s", path, lineno, exc)
            continue
        if category not in VISUAL_CATEGORIES:
            log.error("visual sidecar %s line %d rejected: unknown category %r", path, lineno, category)
            continue
        if not 0.0 <= confidence <= 1.0:
            log.error(
                "visual sidecar %s line %d rejected: confidence %g outside [0, 1]",
                path,
                lineno,
                confidence,
            )
            continue
        records.setdefault(domain_id, []).append(
            VisualRecord(
                domain_id=domain_id,
                image_ref=image_ref,
                category=category,
                confidence=confidence,
                suspicious=category in SUSPICIOUS_CATEGORIES,
            )
        )
    return records
