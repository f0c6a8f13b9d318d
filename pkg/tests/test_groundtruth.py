import io
import itertools
import random

import pytest

from onionrank.errors import ConfigError, DataFormatError
from onionrank.groundtruth import (
    QUESTION_COUNT,
    AnnotationRecord,
    annotate_interactive,
    assignment_plan,
    build_ground_truth,
    gain,
    gains_from_annotations,
    load_annotations,
    load_questionnaire,
    majority_vote,
)


def record(domain, annotator, answers):
    return AnnotationRecord(domain_id=domain, annotator_id=annotator, answers=tuple(answers))


def const_answers(value):
    return [value] * QUESTION_COUNT


def test_bundled_questionnaire_has_23_questions():
    questions = load_questionnaire()
    assert len(questions) == 23
    assert all(q.endswith("?") for q in questions)


def test_questionnaire_wrong_length_rejected(tmp_path):
    path = tmp_path / "q.txt"
    path.write_text("only one question?\n")
    with pytest.raises(DataFormatError):
        load_questionnaire(path)


def test_record_requires_23_answers():
    with pytest.raises(ValueError):
        record("d", "a", [True] * 5)


# ------------------------------------------------------------- voting


def test_vote_identical_vectors():
    answers = [i % 2 == 0 for i in range(QUESTION_COUNT)]
    records = [record("d", a, answers) for a in ("x", "y", "z")]
    assert majority_vote(records) == tuple(answers)


def test_vote_two_of_three_rule():
    a1 = const_answers(True)
    a2 = const_answers(True)
    a3 = const_answers(False)
    assert majority_vote([record("d", "x", a1), record("d", "y", a2), record("d", "z", a3)]) == tuple(
        const_answers(True)
    )
    b1 = const_answers(True)
    b2 = const_answers(False)
    b3 = const_answers(False)
    assert majority_vote([record("d", "x", b1), record("d", "y", b2), record("d", "z", b3)]) == tuple(
        const_answers(False)
    )


def test_vote_matches_truth_table_all_8_cases():
    for bits in itertools.product([False, True], repeat=3):
        answers = [
            record("d", name, [bit] + const_answers(False)[1:])
            for name, bit in zip("xyz", bits)
        ]
        unified = majority_vote(answers)
        assert unified[0] == (sum(bits) >= 2)


def test_vote_symmetric_under_permutation():
    rng = random.Random(4)
    records = [record("d", a, [rng.random() < 0.5 for _ in range(QUESTION_COUNT)]) for a in "xyz"]
    expected = majority_vote(records)
    for perm in itertools.permutations(records):
        assert majority_vote(list(perm)) == expected


def test_vote_rejects_bad_groups():
    answers = const_answers(True)
    with pytest.raises(ConfigError):
        majority_vote([record("d", "x", answers)] * 2)
    with pytest.raises(ConfigError):
        majority_vote([record("d", "x", answers), record("d", "x", answers), record("d", "y", answers)])
    with pytest.raises(ConfigError):
        majority_vote([record("d1", "x", answers), record("d2", "y", answers), record("d1", "z", answers)])


# ------------------------------------------------------------- gain


def test_gain_bounds():
    assert gain(const_answers(False)) == 0
    assert gain(const_answers(True)) == 23
    assert gain([True] * 9 + [False] * 14) == 9


def test_gain_wrong_length():
    with pytest.raises(ConfigError):
        gain([True] * 22)


def test_gain_monotone_under_flip():
    rng = random.Random(1)
    answers = [rng.random() < 0.5 for _ in range(QUESTION_COUNT)]
    base = gain(answers)
    for q in range(QUESTION_COUNT):
        if not answers[q]:
            flipped = list(answers)
            flipped[q] = True
            assert gain(flipped) == base + 1


# ------------------------------------------------------------- assignment


def test_plan_three_annotators_cover_everything():
    plan = assignment_plan([f"d{i}" for i in range(23)], ["a", "b", "c"], seed=0)
    for annotator in ("a", "b", "c"):
        batches = [b for b in plan.batches[annotator] if b]
        assert len(batches) == 1
        assert len(batches[0]) == 23


def test_plan_290_domains_13_annotators():
    domains = [f"d{i:04d}" for i in range(290)]
    annotators = [f"ann{i:02d}" for i in range(13)]
    plan = assignment_plan(domains, annotators, seed=3)
    assignments = list(plan.assignments())
    assert len(assignments) == 870
    judges = {}
    for annotator, domain in assignments:
        judges.setdefault(domain, []).append(annotator)
    assert all(len(v) == 3 and len(set(v)) == 3 for v in judges.values())
    for annotator in annotators:
        for batch in plan.batches[annotator]:
            assert 21 <= len(batch) <= 25
        seen = [d for batch in plan.batches[annotator] for d in batch]
        assert len(seen) == len(set(seen))


def test_plan_infeasible_with_two_annotators():
    with pytest.raises(ConfigError):
        assignment_plan(["d1", "d2"], ["a", "b"])


def test_plan_deterministic():
    domains = [f"d{i}" for i in range(50)]
    annotators = [f"a{i}" for i in range(5)]
    p1 = assignment_plan(domains, annotators, seed=9)
    p2 = assignment_plan(domains, annotators, seed=9)
    assert p1 == p2


# ------------------------------------------------------------- files and sessions


def test_annotation_roundtrip(tmp_path):
    from onionrank.groundtruth import append_annotation

    path = tmp_path / "ann.ndjson"
    rec = record("d1", "alice", [i % 3 == 0 for i in range(QUESTION_COUNT)])
    append_annotation(path, rec)
    append_annotation(path, record("d1", "bob", const_answers(True)))
    loaded = load_annotations(path)
    assert loaded[0] == rec
    assert len(loaded) == 2


def test_build_ground_truth_and_gains(tmp_path):
    from onionrank.groundtruth import append_annotation

    path = tmp_path / "ann.ndjson"
    for annotator, value in (("x", True), ("y", True), ("z", False)):
        append_annotation(path, record("d1", annotator, const_answers(value)))
    truth = build_ground_truth(load_annotations(path))
    assert truth["d1"].gain == 23
    assert gains_from_annotations(path) == {"d1": 23}


def test_build_ground_truth_rejects_partial_coverage():
    records = [record("d1", "x", const_answers(True))]
    with pytest.raises(DataFormatError):
        build_ground_truth(records)


def _scripted_session(corpus, annotator, reply, tmp_path, batch=None):
    out = tmp_path / "session.ndjson"
    batch = batch if batch is not None else corpus.domain_ids()
    n_lines = QUESTION_COUNT * len(batch) + 5
    stdin = io.StringIO((reply + "\n") * n_lines)
    return annotate_interactive(
        corpus, annotator, batch, out, in_stream=stdin, out_stream=io.StringIO()
    ), out


def test_scripted_yes_session_gives_full_gain(mini_corpus, tmp_path):
    for annotator in ("x", "y", "z"):
        _scripted_session(mini_corpus, annotator, "y", tmp_path, batch=["alpha"])
    gains = gains_from_annotations(tmp_path / "session.ndjson")
    assert gains == {"alpha": 23}


def test_scripted_no_session_gives_zero_gain(mini_corpus, tmp_path):
    for annotator in ("x", "y", "z"):
        _scripted_session(mini_corpus, annotator, "n", tmp_path, batch=["beta"])
    assert gains_from_annotations(tmp_path / "session.ndjson") == {"beta": 0}


def test_resumed_session_skips_done_domains(mini_corpus, tmp_path):
    first, out = _scripted_session(mini_corpus, "x", "y", tmp_path, batch=["alpha", "beta"])
    assert len(first) == 2
    second, _ = _scripted_session(mini_corpus, "x", "y", tmp_path, batch=["alpha", "beta"])
    assert second == []
    assert len(load_annotations(out)) == 2
