"""Acceptance gate: one test per release criterion, each printing a PASS line.

Run with ``pytest -s tests/test_acceptance.py`` to see the per-criterion
lines; ``pytest -v`` shows the same pass/fail status through test names.
"""

import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from onionrank.cli import main
from onionrank.corpus import derive_link_graph, ingest_corpus, load_visual_records
from onionrank.crossval import compare_baselines, cross_validate
from onionrank.features import (
    FEATURE_GROUPS,
    FEATURE_NAMES,
    assemble_feature_matrix,
    load_gazetteer,
    standardize,
)
from onionrank.graphalg import centralities, hits, katz, pagerank
from onionrank.groundtruth import AnnotationRecord, assignment_plan, gain, gains_from_annotations, majority_vote
from onionrank.ltr import JudgedDomain, TrainConfig, loss_listnet, loss_pointwise, loss_ranknet
from onionrank.metrics import ndcg_at_k
from onionrank.segmentation import load_lexicon
from onionrank.synth import SynthConfig, generate_corpus

from conftest import random_graph


# ---------------------------------------------------------------- fixtures


@pytest.fixture(scope="module")
def synth290(tmp_path_factory):
    out_dir = tmp_path_factory.mktemp("accept-290")
    return generate_corpus(SynthConfig(n_domains=290, seed=0, noise=0.1, out_dir=out_dir))


@pytest.fixture(scope="module")
def synth60(tmp_path_factory):
    out_dir = tmp_path_factory.mktemp("accept-60")
    return generate_corpus(SynthConfig(n_domains=60, seed=2, noise=0.1, out_dir=out_dir))


def judged_from(synth):
    corpus = ingest_corpus(synth.corpus_dir, emit_report=False)
    graph = derive_link_graph(corpus)
    matrix = assemble_feature_matrix(
        corpus,
        "all",
        gazetteer=load_gazetteer(synth.gazetteer_path),
        lexicon=load_lexicon(synth.lexicon_path),
        visual_records=load_visual_records(synth.visual_path, corpus.domain_ids()),
        graph=graph,
    )
    gains = gains_from_annotations(synth.annotations_path)
    judged = [JudgedDomain(d, gains[d], matrix.row(d)) for d in matrix.domain_ids]
    return judged, graph, matrix


def cli_inputs(synth):
    return [
        "--corpus",
        str(synth.corpus_dir),
        "--gazetteer",
        str(synth.gazetteer_path),
        "--lexicon",
        str(synth.lexicon_path),
        "--visual",
        str(synth.visual_path),
        "--annotations",
        str(synth.annotations_path),
    ]


# ---------------------------------------------------------------- criterion 1


def brute_force_ndcg(order, truth, k):
    """Literal discounted-sum evaluation, independent of the library path."""

    def dcg(gains):
        kk = min(k, len(gains))
        total = gains[0]
        for i in range(2, kk + 1):
            total += gains[i - 1] / math.log2(i)
        return total

    gains = [truth[d] for d in order]
    ideal = sorted(gains, reverse=True)
    idcg = dcg(ideal)
    return dcg(gains) / idcg if idcg > 0 else 0.0


def test_criterion_1_ndcg_oracle_equivalence():
    started = time.monotonic()
    rng = np.random.default_rng(1)
    checked = 0
    for _ in range(200):
        n = int(rng.integers(2, 7))
        ids = [f"x{i}" for i in range(n)]
        truth = {d: int(rng.integers(0, 24)) for d in ids}
        if not any(truth.values()):
            truth[ids[0]] = int(rng.integers(1, 24))
        ideal = sorted(ids, key=lambda d: -truth[d])
        for perm in itertools.permutations(ids):
            for k in (1, 2, n):
                got = ndcg_at_k(list(perm), truth, k)
                want = brute_force_ndcg(list(perm), truth, k)
                assert abs(got - want) <= 1e-12
                checked += 1
        for k in (1, 2, n):
            assert ndcg_at_k(ideal, truth, k) == 1.0
    elapsed = time.monotonic() - started
    assert elapsed < 5.0
    print(f"\nACCEPTANCE 1 PASS: NDCG oracle equivalence ({checked} checks in {elapsed:.2f}s)")


# ---------------------------------------------------------------- criterion 2


def test_criterion_2_gradient_checks():
    started = time.monotonic()
    rng = np.random.default_rng(2)
    step = 1e-5
    losses = {"pointwise": loss_pointwise, "pairwise": loss_ranknet, "listwise": loss_listnet}
    for trial in range(100):
        n = int(rng.integers(2, 11))
        scores = rng.standard_normal(n) * 2.0
        gains = rng.integers(0, 24, n).astype(float)
        if len(set(gains)) < 2:
            gains[0], gains[1] = 23.0, 0.0
        for name, loss_fn in losses.items():
            _, grad = loss_fn(scores, gains)
            for i in range(n):
                up = scores.copy()
                up[i] += step
                down = scores.copy()
                down[i] -= step
                numeric = (loss_fn(up, gains)[0] - loss_fn(down, gains)[0]) / (2 * step)
                assert abs(grad[i] - numeric) <= 1e-4 * max(abs(grad[i]), abs(numeric), 1e-6), name
    elapsed = time.monotonic() - started
    assert elapsed < 10.0
    print(f"\nACCEPTANCE 2 PASS: loss gradients match finite differences ({elapsed:.2f}s)")


# ---------------------------------------------------------------- criterion 3


def _dense(graph):
    nodes = sorted(graph.nodes)
    index = {v: i for i, v in enumerate(nodes)}
    a = np.zeros((len(nodes), len(nodes)))
    for src, dst in graph.edges:
        a[index[src], index[dst]] = 1.0
    return nodes, a


def test_criterion_3_graph_algorithm_oracles():
    for seed in range(50):
        graph = random_graph(20, 0.12, seed + 1000)
        nodes, a = _dense(graph)
        n = len(nodes)

        result = pagerank(graph)
        assert abs(sum(result.scores().values()) - 1.0) <= 1e-9
        out = a.sum(axis=1)
        g = np.where(out[:, None] > 0, a / np.where(out[:, None] > 0, out[:, None], 1.0), 1.0 / n)
        p = np.linalg.solve(np.eye(n) - 0.85 * g.T, np.full(n, 0.15 / n))
        oracle = dict(zip(nodes, p))
        for node, score in result.entries:
            assert abs(score - oracle[node]) <= 1e-8

        scores = hits(graph, tol=1e-13, max_iter=5000)
        h = np.full(n, 1.0 / math.sqrt(n))
        auth = np.zeros(n)
        for _ in range(5000):
            auth = a.T @ h
            norm = np.linalg.norm(auth)
            auth = auth / norm if norm else auth
            h = a @ auth
            norm = np.linalg.norm(h)
            h = h / norm if norm else h
        for node, hub_val, auth_val in zip(nodes, h, auth):
            assert abs(scores.hubs[node] - hub_val) <= 1e-8
            assert abs(scores.authorities[node] - auth_val) <= 1e-8

        result = katz(graph, tol=1e-13)
        x = np.linalg.solve(np.eye(n) - 0.1 * a.T, np.ones(n))
        x = x / np.linalg.norm(x)
        oracle = dict(zip(nodes, x))
        for node, score in result.entries:
            assert abs(score - oracle[node]) <= 1e-8

    for seed in range(5):
        graph = random_graph(12, 0.15, seed + 2000)
        got = centralities(graph).betweenness
        want = _betweenness_enumeration(graph)
        assert all(got[v] == want[v] for v in graph.nodes)
    print("\nACCEPTANCE 3 PASS: graph algorithms match dense oracles")


def _betweenness_enumeration(graph):
    nodes = sorted(graph.nodes)
    out = {v: sorted(d for s, d in graph.edges if s == v) for v in nodes}
    acc = {v: Fraction(0) for v in nodes}
    for s in nodes:
        dist = {s: 0}
        frontier = [s]
        while frontier:
            nxt = []
            for v in frontier:
                for w in out[v]:
                    if w not in dist:
                        dist[w] = dist[v] + 1
                        nxt.append(w)
            frontier = nxt
        for t in nodes:
            if t == s or t not in dist:
                continue
            paths = []
            stack = [(s, (s,))]
            while stack:
                v, path = stack.pop()
                if v == t:
                    paths.append(path)
                    continue
                for w in out[v]:
                    if w in dist and dist[w] == dist[v] + 1 and dist[w] <= dist[t]:
                        stack.append((w, path + (w,)))
            sigma = len(paths)
            for path in paths:
                for v in path[1:-1]:
                    acc[v] += Fraction(1, sigma)
    return {v: float(acc[v]) for v in nodes}


# ---------------------------------------------------------------- criterion 4


EXPECTED_FEATURE_ORDER = (
    "recently_updated,updates_count,address_words_count,address_letters_count,"
    "clones_rate,keyword_num,keyword_TF-IDF,keyword_avg_weight,keyword_to_total,"
    "popular_NE_PER,popular_NE_LOC,popular_NE_ORG,popular_NE_PRD,popular_NE_CRTV,"
    "popular_NE_GRP,NE_counter,NE_TF-IDF,popular_NE_TF-IDF,emerging_NE,"
    "internal_links,external_links,img_count,needs_credential,has_title,has_H1,"
    "TF-IDF_title_H1,TF-IDF_alt,suspicious_count,noise_count,total_count,"
    "avg_suspicious_conf,avg_normal_conf,suspicious_majority,in_degree,out_degree,"
    "cls,btwn,eigvec,ToRank_rank,ToRank_top_X"
).split(",")


def test_criterion_4_feature_contract(synth60):
    assert tuple(EXPECTED_FEATURE_ORDER) == FEATURE_NAMES
    assert len(FEATURE_NAMES) == 40
    counts = {g: len(names) for g, names in FEATURE_GROUPS.items()}
    assert counts == {"text": 9, "ner": 10, "html": 8, "visual": 6, "graph": 7}

    judged, _, matrix = judged_from(synth60)
    assert matrix.names == FEATURE_NAMES
    train_rows = matrix.values[:40]
    from onionrank.features import FeatureMatrix

    train_matrix = FeatureMatrix(matrix.domain_ids[:40], matrix.names, train_rows)
    out, stats = standardize(train_matrix)
    for j in range(40):
        if stats.std[j] > 0:
            assert abs(out.values[:, j].mean()) <= 1e-9
            assert abs(out.values[:, j].std() - 1.0) <= 1e-9
    print("\nACCEPTANCE 4 PASS: 40-column contract and standardization moments")


# ---------------------------------------------------------------- criterion 5


def test_criterion_5_ground_truth_protocol():
    for bits in itertools.product([False, True], repeat=3):
        records = [
            AnnotationRecord("d", name, tuple([bit] + [False] * 22))
            for name, bit in zip("xyz", bits)
        ]
        unified = majority_vote(records)
        assert unified[0] == (sum(bits) >= 2)

    rng = np.random.default_rng(5)
    for _ in range(50):
        records = [
            AnnotationRecord("d", name, tuple(bool(b) for b in rng.integers(0, 2, 23)))
            for name in "xyz"
        ]
        value = gain(majority_vote(records))
        assert 0 <= value <= 23

    domains = [f"d{i:04d}" for i in range(290)]
    annotators = [f"ann{i:02d}" for i in range(13)]
    plan = assignment_plan(domains, annotators, seed=0)
    assignments = list(plan.assignments())
    assert len(assignments) == 870
    judges = {}
    for annotator, domain in assignments:
        judges.setdefault(domain, set()).add(annotator)
    assert all(len(v) == 3 for v in judges.values())
    print("\nACCEPTANCE 5 PASS: voting truth table, gain bounds, 3-regular plan")


# ---------------------------------------------------------------- criterion 6


def test_criterion_6_synthetic_end_to_end(synth290):
    started = time.monotonic()
    judged, graph, _ = judged_from(synth290)
    result = cross_validate(judged, "listwise", TrainConfig(seed=0), k_list=(10,))
    listnet10 = result.curve.mean(10)
    baselines = compare_baselines(judged, graph, plan=result.plan, k_list=(10,))
    elapsed = time.monotonic() - started
    assert listnet10 >= 0.90
    for name, curve in baselines.items():
        assert listnet10 > curve.mean(10), name
    assert elapsed <= 300.0
    summary = ", ".join(f"{name}={curve.mean(10):.3f}" for name, curve in sorted(baselines.items()))
    print(
        f"\nACCEPTANCE 6 PASS: listwise NDCG@10={listnet10:.3f} beats {summary} ({elapsed:.0f}s)"
    )


# ---------------------------------------------------------------- criterion 7


def test_criterion_7_cv_determinism(synth60, tmp_path):
    args = [
        "cv",
        *cli_inputs(synth60),
        "--scheme",
        "listwise",
        "--groups",
        "all",
        "--seed",
        "11",
        "--max-epochs",
        "80",
        "--patience",
        "80",
        "--k-list",
        "1,5,10",
    ]
    out1 = tmp_path / "run1"
    out2 = tmp_path / "run2"
    assert main(args + ["--outdir", str(out1)]) == 0
    assert main(args + ["--outdir", str(out2)]) == 0
    for name in ("report.csv", "summary.csv", "folds.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name
    print("\nACCEPTANCE 7 PASS: repeated cv runs emit byte-identical reports")


# ---------------------------------------------------------------- criterion 8


def test_criterion_8_ablation_harness(synth60, tmp_path):
    group_sets = ["text", "ner", "html", "visual", "graph", "text,ner,html"]
    for groups in group_sets:
        outdir = tmp_path / groups.replace(",", "-")
        code = main(
            [
                "cv",
                *cli_inputs(synth60),
                "--scheme",
                "listwise",
                "--groups",
                groups,
                "--seed",
                "1",
                "--max-epochs",
                "40",
                "--patience",
                "40",
                "--k-list",
                "1,5,10",
                "--outdir",
                str(outdir),
            ]
        )
        assert code == 0, groups
        summary = (outdir / "summary.csv").read_text().splitlines()
        listnet_rows = [line for line in summary[1:] if line.startswith("listwise,")]
        assert len(listnet_rows) == 3  # one curve point per K

    trio = tmp_path / "trio.csv"
    code = main(
        [
            "features",
            *cli_inputs(synth60)[:8],  # corpus/gazetteer/lexicon/visual
            "--groups",
            "text,ner,html",
            "--out",
            str(trio),
        ]
    )
    assert code == 0
    header = trio.read_text().splitlines()[0].split(",")
    assert len(header) - 1 == 27
    print("\nACCEPTANCE 8 PASS: ablation cv curves per group; text+ner+html uses 27 features")
