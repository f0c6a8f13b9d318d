"""Single-pass HTML scanning built on the stdlib parser.

One scan of a page yields everything downstream stages need: the
user-visible text, anchor hyperlinks with their anchor text, title and
H1 contents, image tag counts with alt text, and credential-input
detection. Script and style contents and comments are dropped; every
other text node is kept. The parser is deliberately tolerant because
scraped pages are frequently malformed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from html.parser import HTMLParser

_WS_RUN = re.compile(r"\s+")
_CREDENTIAL_ATTR = re.compile(r"login|user|pass|signin", re.IGNORECASE)

# Text inside these elements is never user-visible.
_HIDDEN_CONTENT_TAGS = frozenset({"script", "style"})


def normalize_whitespace(text: str) -> str:
    """Collapse whitespace runs to single spaces and trim the ends."""
    return _WS_RUN.sub(" ", text).strip()


@dataclass
class PageScan:
    """Everything extracted from one HTML page in a single pass."""

    visible_text: str = ""
    hyperlinks: tuple[tuple[str, str], ...] = ()
    title_texts: tuple[str, ...] = ()
    h1_texts: tuple[str, ...] = ()
    img_count: int = 0
    alt_texts: tuple[str, ...] = ()
    needs_credential: bool = False

    @property
    def has_title(self) -> bool:
        return any(t.strip() for t in self.title_texts)

    @property
    def has_h1(self) -> bool:
        return any(t.strip() for t in self.h1_texts)

    def title_h1_text(self) -> str:
        return " ".join(list(self.title_texts) + list(self.h1_texts))


class _Scanner(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.chunks: list[str] = []
        self.links: list[tuple[str, str]] = []
        self.titles: list[str] = []
        self.h1s: list[str] = []
        self.alts: list[str] = []
        self.img_count = 0
        self.needs_credential = False
        self._hidden_depth = 0
        self._anchor_stack: list[tuple[str, list[str]]] = []
        self._title_depth = 0
        self._title_buf: list[str] = []
        self._h1_depth = 0
        self._h1_buf: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag in _HIDDEN_CONTENT_TAGS:
            self._hidden_depth += 1
            return
        attr_map = {k: (v or "") for k, v in attrs}
        if tag == "a":
            href = attr_map.get("href")
            if href is not None:
                self._anchor_stack.append((href, []))
        elif tag == "img":
            self.img_count += 1
            alt = attr_map.get("alt", "").strip()
            if alt:
                self.alts.append(alt)
        elif tag == "input":
            if attr_map.get("type", "").lower() == "password":
                self.needs_credential = True
            elif _CREDENTIAL_ATTR.search(attr_map.get("name", "")) or _CREDENTIAL_ATTR.search(
                attr_map.get("id", "")
            ):
                self.needs_credential = True
        elif tag == "title":
            self._title_depth += 1
        elif tag == "h1":
            self._h1_depth += 1

    def handle_endtag(self, tag):
        if tag in _HIDDEN_CONTENT_TAGS:
            self._hidden_depth = max(0, self._hidden_depth - 1)
            return
        if tag == "a" and self._anchor_stack:
            href, texts = self._anchor_stack.pop()
            self.links.append((href, normalize_whitespace(" ".join(texts))))
        elif tag == "title" and self._title_depth:
            self._title_depth -= 1
            if self._title_depth == 0:
                self.titles.append(normalize_whitespace(" ".join(self._title_buf)))
                self._title_buf = []
        elif tag == "h1" and self._h1_depth:
            self._h1_depth -= 1
            if self._h1_depth == 0:
                self.h1s.append(normalize_whitespace(" ".join(self._h1_buf)))
                self._h1_buf = []

    def handle_data(self, data):
        if self._hidden_depth or not data:
            return
        self.chunks.append(data)
        for _, texts in self._anchor_stack:
            texts.append(data)
        if self._title_depth:
            self._title_buf.append(data)
        if self._h1_depth:
            self._h1_buf.append(data)

    def finish(self) -> PageScan:
        self.close()
        # Unclosed anchors still count as links.
        while self._anchor_stack:
            href, texts = self._anchor_stack.pop()
            self.links.append((href, normalize_whitespace(" ".join(texts))))
        return PageScan(
            visible_text=normalize_whitespace(" ".join(self.chunks)),
            hyperlinks=tuple(self.links),
            title_texts=tuple(self.titles),
            h1_texts=tuple(self.h1s),
            img_count=self.img_count,
            alt_texts=tuple(self.alts),
            needs_credential=self.needs_credential,
        )


def scan_html(html: str) -> PageScan:
    """Parse one page and return its scan. Tolerates malformed markup."""
    scanner = _Scanner()
    scanner.feed(html)
    return scanner.finish()
