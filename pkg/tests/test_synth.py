import hashlib
from pathlib import Path

import numpy as np
import pytest

from onionrank.corpus import derive_link_graph, ingest_corpus
from onionrank.errors import ConfigError
from onionrank.features import FeatureConfig, assemble_feature_matrix
from onionrank.groundtruth import gains_from_annotations
from onionrank.segmentation import load_lexicon
from onionrank.synth import SynthConfig, generate_corpus


def tree_digest(root: Path) -> str:
    digest = hashlib.sha256()
    for path in sorted(root.rglob("*")):
        if path.is_file():
            digest.update(str(path.relative_to(root)).encode())
            digest.update(path.read_bytes())
    return digest.hexdigest()


def test_config_validation(tmp_path):
    with pytest.raises(ConfigError):
        SynthConfig(n_domains=5, out_dir=tmp_path)
    with pytest.raises(ConfigError):
        SynthConfig(noise=1.5, out_dir=tmp_path)


def test_generation_is_byte_deterministic(tmp_path):
    out1 = generate_corpus(SynthConfig(n_domains=12, seed=42, out_dir=tmp_path / "one"))
    out2 = generate_corpus(SynthConfig(n_domains=12, seed=42, out_dir=tmp_path / "two"))
    assert tree_digest(tmp_path / "one") == tree_digest(tmp_path / "two")
    out3 = generate_corpus(SynthConfig(n_domains=12, seed=43, out_dir=tmp_path / "three"))
    assert tree_digest(tmp_path / "one") != tree_digest(tmp_path / "three")


def test_noiseless_gains_equal_planted(tmp_path):
    out = generate_corpus(SynthConfig(n_domains=30, seed=3, noise=0.0, out_dir=tmp_path))
    gains = gains_from_annotations(out.annotations_path)
    for domain_id, latent in out.latent.items():
        assert gains[domain_id] == round(latent)


def test_derived_graph_reproduces_planted_edges(tmp_path):
    out = generate_corpus(SynthConfig(n_domains=25, seed=8, out_dir=tmp_path))
    corpus = ingest_corpus(out.corpus_dir, emit_report=False)
    graph = derive_link_graph(corpus)
    assert graph.edges == out.edges
    planted_lines = out.edges_path.read_text().splitlines()
    assert len(planted_lines) == len(out.edges)


def test_keyword_signal_reaches_features(tmp_path):
    out = generate_corpus(SynthConfig(n_domains=40, seed=5, noise=0.0, out_dir=tmp_path))
    corpus = ingest_corpus(out.corpus_dir, emit_report=False)
    matrix = assemble_feature_matrix(
        corpus,
        "text",
        lexicon=load_lexicon(out.lexicon_path),
        config=FeatureConfig(),
    )
    keyword_num = matrix.values[:, list(matrix.names).index("keyword_num")]
    latent = np.array([out.latent[d] for d in matrix.domain_ids])

    def spearman(a, b):
        ra = np.argsort(np.argsort(a)).astype(float)
        rb = np.argsort(np.argsort(b)).astype(float)
        return float(np.corrcoef(ra, rb)[0, 1])

    assert spearman(latent, keyword_num) >= 0.5


def test_vote_noise_expectation_oracle(tmp_path):
    """Simulated 2-of-3 voting with 10% flips stays within one gain point."""
    rng = np.random.default_rng(0)
    sigma = 0.1
    diffs = []
    for _ in range(120):
        planted = rng.random(23) < 0.5
        flips = rng.random((3, 23)) < sigma
        votes = planted[None, :] ^ flips
        unified = votes.sum(axis=0) >= 2
        diffs.append(abs(int(unified.sum()) - int(planted.sum())))
    assert np.mean(diffs) <= 1.0
    # and the actual generator obeys the same bound
    out = generate_corpus(SynthConfig(n_domains=60, seed=9, noise=sigma, out_dir=tmp_path))
    gains = gains_from_annotations(out.annotations_path)
    observed = [abs(gains[d] - round(latent)) for d, latent in out.latent.items()]
    assert np.mean(observed) <= 1.0


def test_signal_knob_controls_feature_coupling(tmp_path):
    strong = generate_corpus(SynthConfig(n_domains=30, seed=4, out_dir=tmp_path / "s1"))
    weak = generate_corpus(SynthConfig(n_domains=30, seed=4, signal=0.0, out_dir=tmp_path / "s0"))
    # with the signal off, page volume no longer tracks the latent value
    strong_sizes = {d: sum(1 for _ in (strong.corpus_dir / d / "pages").iterdir()) for d in strong.latent}
    weak_sizes = {d: sum(1 for _ in (weak.corpus_dir / d / "pages").iterdir()) for d in weak.latent}
    assert max(weak_sizes.values()) <= min(2, max(weak_sizes.values()))
    assert max(strong_sizes.values()) > max(weak_sizes.values())


def test_clone_pairs_share_text(tmp_path):
    out = generate_corpus(SynthConfig(n_domains=20, seed=1, out_dir=tmp_path))
    corpus = ingest_corpus(out.corpus_dir, emit_report=False)
    texts = {}
    for domain in corpus:
        texts.setdefault(domain.text(), []).append(domain.domain_id)
    clone_groups = [ids for ids in texts.values() if len(ids) > 1]
    assert len(clone_groups) == 3
    assert all(len(ids) == 2 for ids in clone_groups)
