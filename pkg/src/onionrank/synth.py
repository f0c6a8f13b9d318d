"""Synthetic corpora with a planted attractiveness signal.

Each generated domain draws a latent attractiveness in [0, 23] and the
generator leans every observable the pipeline measures on it: richer
vocabulary, more product-entity mentions, more pages and images, recent
update stamps, credential forms, wordier addresses, and a higher chance
of attracting in-links. Three simulated annotators answer the planted
questionnaire vector with independent per-question flip noise, so the
unified gains recover the latent values up to that noise.

Everything is written through the same on-disk formats the ingester and
annotation tooling read, which makes the generator double as an
integration fixture. A fixed seed reproduces the corpus byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .groundtruth import QUESTION_COUNT

SCRAPE_TIME = "2026-01-15T00:00:00Z"
ONION_ALPHABET = "abcdefghijklmnopqrstuvwxyz234567"

COMMON_WORDS = (
    "the of and to in for on with you we buy from this that your all new "
    "order ship pack price list item good fast safe top page about contact "
    "mail send pay coin wallet free every only here more most very can will "
    "now get our they them when what where some real pure grade lab tested "
    "stock gram ounce kilo batch fresh daily week month review vendor trust "
    "escrow track stealth discreet world europe usa delivery quality premium "
    "sample deal offer discount bonus club member login account support faq "
    "news update info terms rules guide help secure private anon market shop"
).split()

DOMAIN_WORDS = (
    "drug market shop store best green deal power crystal dream blue plaza "
    "direct express supply garden farm royal king queen silk road high pharma"
).split()

PRODUCT_ENTITIES = (
    "cocaine heroin cannabis mdma lsd ketamine hashish mushrooms steroids "
    "xanax oxycodone amphetamine dreamdust moonrock snowcap bluelotus "
    "nightshade sunhaze".split()
)
PERSON_ENTITIES = ("marlowe", "vargas", "kessler", "doctor bishop", "captain henry", "silva")
LOCATION_ENTITIES = ("amsterdam", "rotterdam", "berlin", "lisbon", "prague", "bangkok", "medellin")
ORG_ENTITIES = ("eurocartel", "pharmaline", "silk bazaar", "night traders")
CREATIVE_ENTITIES = ("white lines", "midnight run", "glass city")
GROUP_ENTITIES = ("ghost crew", "red circle", "border wolves")

SUSPICIOUS_IMAGE_CATEGORIES = ("Drugs", "Cryptocurrency", "Counterfeit Money", "Hacking")

ANNOTATORS = tuple(f"ann{i:02d}" for i in range(13))


@dataclass(frozen=True)
class SynthConfig:
    n_domains: int = 290
    seed: int = 0
    noise: float = 0.1
    link_density: float = 3.0
    signal: float = 1.0  # scales how hard attractiveness drives the observables
    out_dir: Path = Path("synth-out")

    def __post_init__(self):
        if self.n_domains < 10:
            raise ConfigError("n_domains must be at least 10")
        if not 0.0 <= self.noise <= 1.0:
            raise ConfigError("noise must lie in [0, 1]")
        if self.signal < 0.0:
            raise ConfigError("signal must be non-negative")


@dataclass(frozen=True)
class SynthOutput:
    corpus_dir: Path
    annotations_path: Path
    planted_path: Path
    visual_path: Path
    gazetteer_path: Path
    lexicon_path: Path
    edges_path: Path
    edges: frozenset[tuple[str, str]]
    latent: dict[str, float]


def ranked_lexicon() -> list[str]:
    """Frequency-ranked unigram list shared by generator and consumers."""
    seen = set()
    out = []
    for word in list(COMMON_WORDS) + list(DOMAIN_WORDS):
        if word not in seen:
            seen.add(word)
            out.append(word)
    return out


def gazetteer_entries() -> dict[str, str]:
    entries: dict[str, str] = {}
    for surface in PRODUCT_ENTITIES:
        entries[surface] = "PRD"
    for surface in PERSON_ENTITIES:
        entries[surface] = "PER"
    for surface in LOCATION_ENTITIES:
        entries[surface] = "LOC"
    for surface in ORG_ENTITIES:
        entries[surface] = "ORG"
    for surface in CREATIVE_ENTITIES:
        entries[surface] = "CRTV"
    for surface in GROUP_ENTITIES:
        entries[surface] = "GRP"
    return entries


def _pick(rng, pool, k):
    k = min(k, len(pool))
    if k <= 0:
        return []
    idx = rng.choice(len(pool), size=k, replace=False)
    return [pool[i] for i in sorted(idx)]


def _sentence(rng, attr: float, n_words: int) -> str:
    # richer vocabulary slice for more attractive domains
    pool = COMMON_WORDS[: max(15, int(15 + attr * (len(COMMON_WORDS) - 15)))]
    words = [pool[rng.integers(0, len(pool))] for _ in range(n_words)]
    return " ".join(words)


def _address(rng, attr: float, used: set[str]) -> str:
    while True:
        if rng.random() < 0.15 + 0.7 * attr:
            words = _pick(rng, DOMAIN_WORDS, 2 + int(rng.random() < 0.4))
            label = "".join(words)
            pad = 16 - len(label)
            if pad > 0:
                label += "".join(ONION_ALPHABET[rng.integers(0, 32)] for _ in range(pad))
            label = label[:16]
        else:
            label = "".join(ONION_ALPHABET[rng.integers(0, 32)] for _ in range(16))
        address = label + ".onion"
        if address not in used:
            used.add(address)
            return address


def _dates(rng, attr: float) -> list[str]:
    n = int(round(attr * 5 * rng.uniform(0.7, 1.3)))
    stamps = []
    recent = attr > 0.4 or rng.random() < 0.1
    days = rng.choice(80, size=min(n, 80), replace=False) if n else []
    for d in days:
        if recent:
            month_day = int(d)
            if month_day < 15:
                stamps.append(f"2026-01-{month_day + 1:02d}")
            else:
                stamps.append(f"2025-12-{(month_day - 15) % 28 + 1:02d}")
        else:
            stamps.append(f"2019-{(int(d) % 12) + 1:02d}-{(int(d) % 27) + 1:02d}")
    if stamps and rng.random() < 0.3:
        stamps[0] = "March 3, 2026" if recent else "March 3, 2019"
    return stamps


def _domain_pages(rng, attr: float, products, out_addresses) -> dict[str, str]:
    """All page files of one domain, keyed by file name."""
    pages: dict[str, str] = {}
    n_product_pages = int(round(attr * 7 * rng.uniform(0.8, 1.2)))

    landing: list[str] = ["<html><head>"]
    title_words = " ".join(_pick(rng, DOMAIN_WORDS, 3))
    if rng.random() < 0.15 + 0.8 * attr:
        landing.append(f"<title>{title_words} {products[0] if products else ''}</title>")
    landing.append("</head><body>")
    if rng.random() < 0.15 + 0.75 * attr:
        landing.append(f"<h1>{title_words}</h1>")
    if rng.random() < 0.05 + 0.7 * attr:
        landing.append('<form><input type="password" name="pass"><input name="login"></form>')
    landing.append(f"<p>{_sentence(rng, attr, 14)}</p>")
    for stamp in _dates(rng, attr):
        landing.append(f"<p>updated {stamp}</p>")
    n_imgs = int(round(attr * 9 * rng.uniform(0.7, 1.3)))
    for j in range(n_imgs):
        alt = products[j % len(products)] if products else "banner"
        landing.append(f'<img src="img{j}.png" alt="{alt} photo">')
    for p in range(1, n_product_pages + 1):
        landing.append(f'<a href="/p{p:03d}.html">catalog {p}</a>')
    landing.append("</body></html>")
    pages["p000.html"] = "\n".join(landing)

    for p in range(1, n_product_pages + 1):
        body = ["<html><body>"]
        lead = products[(p - 1) % len(products)] if products else None
        if lead is not None:
            mentions = 2 + int(round(attr * 7))
            body.append(f"<p>{' '.join([lead] * mentions)}</p>")
        body.append(f"<p>{_sentence(rng, attr, 25)}</p>")
        body.append('<a href="/p000.html">home</a>')
        body.append("</body></html>")
        pages[f"p{p:03d}.html"] = "\n".join(body)

    if out_addresses:
        links = ["<html><body><ul>"]
        for addr in out_addresses:
            links.append(f'<li><a href="http://{addr}/">mirror</a></li>')
        links.append("</ul></body></html>")
        pages["p900.html"] = "\n".join(links)
    return pages


def _entity_paragraphs(rng, attr: float, products) -> str:
    parts = []
    for pool in (PERSON_ENTITIES, LOCATION_ENTITIES, ORG_ENTITIES, CREATIVE_ENTITIES, GROUP_ENTITIES):
        for surface in _pick(rng, pool, int(round(attr * 2 * rng.uniform(0.5, 1.5)))):
            parts.append(surface)
    for surface in products[1:]:
        parts.extend([surface] * (1 + int(rng.random() < attr)))
    return " ".join(parts)


def generate_corpus(config: SynthConfig) -> SynthOutput:
    """Write the corpus tree plus all sidecar files; deterministic per seed."""
    rng = np.random.default_rng(config.seed)
    out = Path(config.out_dir)
    corpus_dir = out / "corpus"
    corpus_dir.mkdir(parents=True, exist_ok=True)

    ids = [f"d{i:04d}" for i in range(config.n_domains)]
    latent = {d: float(rng.uniform(0.0, 23.0)) for d in ids}
    # how strongly each domain's observables lean on its latent value
    drive = {d: min(1.0, (latent[d] / 23.0) * config.signal) for d in ids}
    used_addresses: set[str] = set()
    address = {d: _address(rng, drive[d], used_addresses) for d in ids}

    # the lowest-attractiveness domains form clone pairs: the second of
    # each pair publishes byte-identical pages under its own address
    by_attr = sorted(ids, key=lambda d: latent[d])
    clone_of = {}
    for i in range(3):
        template, copier = by_attr[2 * i], by_attr[2 * i + 1]
        clone_of[copier] = template

    edges: dict[str, list[str]] = {d: [] for d in ids}
    for d in ids:
        if d in clone_of:
            continue
        excluded = {d}
        for copier, template in clone_of.items():
            if template == d:
                excluded.add(copier)
        candidates = [t for t in ids if t not in excluded]
        weights = np.array([0.25 + 0.75 * drive[t] ** 2 for t in candidates])
        k = min(len(candidates), int(rng.poisson(config.link_density)))
        if k > 0:
            chosen = rng.choice(len(candidates), size=k, replace=False, p=weights / weights.sum())
            edges[d] = sorted(candidates[i] for i in chosen)
    for copier, template in clone_of.items():
        edges[copier] = list(edges[template])

    pages_by_domain: dict[str, dict[str, str]] = {}
    products_by_domain: dict[str, list[str]] = {}
    for d in ids:
        if d in clone_of:
            continue
        attr = drive[d]
        n_products = max(1, int(round(attr * 5 * rng.uniform(0.7, 1.3))))
        products = _pick(rng, PRODUCT_ENTITIES, n_products)
        products_by_domain[d] = products
        out_addrs = [address[t] for t in edges[d]]
        pages = _domain_pages(rng, attr, products, out_addrs)
        entity_text = _entity_paragraphs(rng, attr, products)
        if entity_text:
            pages["p000.html"] = pages["p000.html"].replace(
                "</body></html>", f"<p>{entity_text}</p>\n</body></html>"
            )
        pages_by_domain[d] = pages
    for copier, template in clone_of.items():
        pages_by_domain[copier] = dict(pages_by_domain[template])
        products_by_domain[copier] = list(products_by_domain[template])

    for d in ids:
        ddir = corpus_dir / d
        (ddir / "pages").mkdir(parents=True, exist_ok=True)
        meta = {"address": address[d], "scrape_time": SCRAPE_TIME}
        (ddir / "meta.json").write_text(json.dumps(meta, sort_keys=True), encoding="utf-8", newline="\n")
        for fname, content in sorted(pages_by_domain[d].items()):
            (ddir / "pages" / fname).write_text(content, encoding="utf-8", newline="\n")

    # visual sidecar: suspicious volume and confidence rise with attractiveness
    visual_path = out / "visual.ndjson"
    visual_lines = []
    for d in ids:
        attr = drive[d]
        n_susp = int(round(attr * 7 * rng.uniform(0.7, 1.3)))
        n_noise = int(round((1.0 - attr) * 3 * rng.uniform(0.5, 1.5)))
        for j in range(n_susp):
            if rng.random() < 0.3:
                cat = SUSPICIOUS_IMAGE_CATEGORIES[int(rng.integers(0, len(SUSPICIOUS_IMAGE_CATEGORIES)))]
            else:
                cat = "Drugs"
            conf = float(np.clip(rng.normal(0.5 + 0.45 * attr, 0.07), 0.0, 1.0))
            visual_lines.append(
                json.dumps(
                    {"domain_id": d, "image_ref": f"img{j}.png", "category": cat, "confidence": round(conf, 6)},
                    sort_keys=True,
                )
            )
        for j in range(n_noise):
            conf = float(np.clip(rng.normal(0.65, 0.1), 0.0, 1.0))
            visual_lines.append(
                json.dumps(
                    {
                        "domain_id": d,
                        "image_ref": f"noise{j}.png",
                        "category": "Others",
                        "confidence": round(conf, 6),
                    },
                    sort_keys=True,
                )
            )
    visual_path.write_text("\n".join(visual_lines) + ("\n" if visual_lines else ""), encoding="utf-8", newline="\n")

    # three annotators per domain answer the planted vector with flip noise
    annotations_path = out / "annotations.ndjson"
    ann_lines = []
    for i, d in enumerate(ids):
        k = int(round(latent[d]))
        true_idx = set(int(x) for x in rng.choice(QUESTION_COUNT, size=k, replace=False)) if k else set()
        planted = [q in true_idx for q in range(QUESTION_COUNT)]
        for r in range(3):
            annotator = ANNOTATORS[(3 * i + r) % len(ANNOTATORS)]
            answers = [(not v) if rng.random() < config.noise else v for v in planted]
            ann_lines.append(
                json.dumps(
                    {"annotator_id": annotator, "answers": answers, "domain_id": d},
                    sort_keys=True,
                )
            )
    annotations_path.write_text("\n".join(ann_lines) + "\n", encoding="utf-8", newline="\n")

    planted_path = out / "planted.csv"
    planted_lines = ["domain_id,latent_gain"] + [f"{d},{latent[d]:.17g}" for d in ids]
    planted_path.write_text("\n".join(planted_lines) + "\n", encoding="utf-8", newline="\n")

    gazetteer_path = out / "gazetteer.tsv"
    gaz_lines = [f"{surface}\t{category}" for surface, category in sorted(gazetteer_entries().items())]
    gazetteer_path.write_text("\n".join(gaz_lines) + "\n", encoding="utf-8", newline="\n")

    lexicon_path = out / "lexicon.txt"
    lexicon_path.write_text("\n".join(ranked_lexicon()) + "\n", encoding="utf-8", newline="\n")

    edge_set = frozenset((src, dst) for src, targets in edges.items() for dst in targets)
    edges_path = out / "planted_edges.tsv"
    edge_lines = [f"{src}\t{dst}" for src, dst in sorted(edge_set)]
    edges_path.write_text("\n".join(edge_lines) + ("\n" if edge_lines else ""), encoding="utf-8", newline="\n")

    return SynthOutput(
        corpus_dir=corpus_dir,
        annotations_path=annotations_path,
        planted_path=planted_path,
        visual_path=visual_path,
        gazetteer_path=gazetteer_path,
        lexicon_path=lexicon_path,
        edges_path=edges_path,
        edges=edge_set,
        latent=latent,
    )
