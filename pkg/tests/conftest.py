import json
import random
from pathlib import Path

import pytest

from onionrank.corpus import LinkGraph, ingest_corpus


def write_corpus_tree(root: Path, domains: dict) -> Path:
    """Write a corpus directory from {domain_id: (address, {page: html})}."""
    for domain_id, (address, pages) in domains.items():
        ddir = root / domain_id
        (ddir / "pages").mkdir(parents=True)
        (ddir / "meta.json").write_text(
            json.dumps({"address": address, "scrape_time": "2026-01-15T00:00:00Z"}),
            encoding="utf-8",
        )
        for page_id, html in pages.items():
            (ddir / "pages" / f"{page_id}.html").write_text(html, encoding="utf-8")
    return root


@pytest.fixture
def mini_corpus(tmp_path):
    root = write_corpus_tree(
        tmp_path / "corpus",
        {
            "alpha": (
                "alphaalphaalpha1.onion",
                {
                    "p00": "<html><title>green market</title><body><h1>welcome</h1>"
                    '<p>drug market deals</p><a href="http://betabetabetabet2.onion/">beta</a>'
                    '<a href="http://betabetabetabet2.onion/x">beta again</a></body></html>',
                    "p01": '<p>more text here</p><a href="/p00.html">home</a>',
                },
            ),
            "beta": (
                "betabetabetabet2.onion",
                {
                    "p00": '<p>beta content</p><a href="http://alphaalphaalpha1.onion/">alpha</a>'
                    '<img src="x.png" alt="pill photo">',
                },
            ),
            "gamma": (
                "gammagammagamma3.onion",
                {"p00": "<p>isolated island</p>"},
            ),
        },
    )
    return ingest_corpus(root, emit_report=False)


def random_graph(n: int, p: float, seed: int) -> LinkGraph:
    rng = random.Random(seed)
    nodes = [f"n{i:02d}" for i in range(n)]
    edges = set()
    for a in nodes:
        for b in nodes:
            if a != b and rng.random() < p:
                edges.add((a, b))
    return LinkGraph(nodes=frozenset(nodes), edges=frozenset(edges))
