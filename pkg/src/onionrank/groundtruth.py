"""Manual annotation protocol: 23 binary questions, 3 judges, 2-of-3 voting.

Every domain is judged by exactly three distinct annotators, each
answering the same 23 yes/no questions. Per-question majority voting
unifies the three answer vectors, and a domain's gain is the count of
affirmative unified answers, so gains live in [0, 23]. Annotation files
are newline-delimited JSON and append-only, which makes interactive
sessions resumable.
"""

from __future__ import annotations

import json
import random
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import ConfigError, DataFormatError

QUESTION_COUNT = 23


def load_questionnaire(path=None) -> list[str]:
    """The canonical ordered question list; '#' lines are comments."""
    if path is None:
        text = resources.files("onionrank.data").joinpath("questionnaire_v1.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    questions = [line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")]
    if len(questions) != QUESTION_COUNT:
        raise DataFormatError(f"questionnaire must have {QUESTION_COUNT} questions, found {len(questions)}")
    return questions


@dataclass(frozen=True)
class AnnotationRecord:
    """One annotator's 23 answers for one domain."""

    domain_id: str
    annotator_id: str
    answers: tuple[bool, ...]

    def __post_init__(self):
        if len(self.answers) != QUESTION_COUNT:
            raise ValueError(f"expected {QUESTION_COUNT} answers, got {len(self.answers)}")


@dataclass(frozen=True)
class DomainTruth:
    """Unified answers and the resulting gain for one domain."""

    domain_id: str
    answers: tuple[bool, ...]
    gain: int


@dataclass(frozen=True)
class AssignmentPlan:
    """Per-annotator batches; round r holds each domain's r-th judging."""

    batches: dict[str, list[list[str]]]

    def assignments(self):
        for annotator, rounds in sorted(self.batches.items()):
            for batch in rounds:
                for domain_id in batch:
                    yield annotator, domain_id

    def judges_of(self, domain_id: str) -> list[str]:
        return sorted(a for a, d in self.assignments() if d == domain_id)


def assignment_plan(domain_ids, annotator_ids, per_domain: int = 3, batch_size: int = 23, seed: int = 0) -> AssignmentPlan:
    """Assign each domain to ``per_domain`` distinct annotators in balanced batches.

    Deterministic for a given seed. Annotator workloads stay within one
    assignment of each other, and each annotator's work in a round is
    chunked into batches as close to ``batch_size`` as the totals allow.
    """
    domains = sorted(set(domain_ids))
    annotators = sorted(set(annotator_ids))
    if len(annotators) < per_domain:
        raise ConfigError(f"need at least {per_domain} annotators, have {len(annotators)}")
    rng = random.Random(seed)
    order = list(domains)
    rng.shuffle(order)
    load = {a: 0 for a in annotators}
    judges: dict[str, list[str]] = {}
    for domain in order:
        chosen = sorted(annotators, key=lambda a: (load[a], a))[:per_domain]
        judges[domain] = chosen
        for a in chosen:
            load[a] += 1
    per_round: dict[str, list[list[str]]] = {a: [[] for _ in range(per_domain)] for a in annotators}
    for domain in order:
        for r, annotator in enumerate(judges[domain]):
            per_round[annotator][r].append(domain)
    batches = {a: [] for a in annotators}
    for a in annotators:
        for round_domains in per_round[a]:
            batches[a].extend(_chunk_balanced(round_domains, batch_size))
    return AssignmentPlan(batches=batches)


def _chunk_balanced(items: list[str], batch_size: int) -> list[list[str]]:
    if not items:
        return []
    n_batches = max(1, round(len(items) / batch_size))
    base, extra = divmod(len(items), n_batches)
    out = []
    start = 0
    for i in range(n_batches):
        size = base + (1 if i < extra else 0)
        out.append(items[start : start + size])
        start += size
    return out


def majority_vote(records) -> tuple[bool, ...]:
    """Unify three answer vectors per question with the 2-of-3 rule."""
    records = list(records)
    if len(records) != 3:
        raise ConfigError(f"majority voting needs exactly 3 records, got {len(records)}")
    domain_ids = {r.domain_id for r in records}
    if len(domain_ids) != 1:
        raise ConfigError(f"records span multiple domains: {sorted(domain_ids)}")
    annotators = {r.annotator_id for r in records}
    if len(annotators) != 3:
        raise ConfigError("records must come from three distinct annotators")
    return tuple(sum(r.answers[q] for r in records) >= 2 for q in range(QUESTION_COUNT))


def gain(answers) -> int:
    """Number of affirmative unified answers."""
    answers = tuple(answers)
    if len(answers) != QUESTION_COUNT:
        raise ConfigError(f"expected {QUESTION_COUNT} answers, got {len(answers)}")
    return sum(1 for a in answers if a)


def build_ground_truth(records) -> dict[str, DomainTruth]:
    """Vote and score every domain; each one must carry exactly 3 records."""
    by_domain: dict[str, list[AnnotationRecord]] = {}
    for record in records:
        by_domain.setdefault(record.domain_id, []).append(record)
    truth: dict[str, DomainTruth] = {}
    for domain_id in sorted(by_domain):
        group = by_domain[domain_id]
        if len(group) != 3:
            raise DataFormatError(f"domain {domain_id} has {len(group)} annotation records, expected 3")
        answers = majority_vote(group)
        truth[domain_id] = DomainTruth(domain_id=domain_id, answers=answers, gain=gain(answers))
    return truth


def load_annotations(path) -> list[AnnotationRecord]:
    records = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            raw = json.loads(line)
            records.append(
                AnnotationRecord(
                    domain_id=str(raw["domain_id"]),
                    annotator_id=str(raw["annotator_id"]),
                    answers=tuple(bool(a) for a in raw["answers"]),
                )
            )
        except (ValueError, KeyError, TypeError) as exc:
            raise DataFormatError(f"{path} line {lineno}: {exc}") from exc
    return records


def append_annotation(path, record: AnnotationRecord) -> None:
    payload = {
        "domain_id": record.domain_id,
        "annotator_id": record.annotator_id,
        "answers": [bool(a) for a in record.answers],
    }
    with open(path, "a", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(payload, sort_keys=True) + "\n")


def gains_from_annotations(path) -> dict[str, int]:
    """Per-domain gains from an annotation file (vote, then count)."""
    truth = build_ground_truth(load_annotations(path))
    return {d: t.gain for d, t in truth.items()}


_YES = {"y", "yes", "1", "true"}
_NO = {"n", "no", "0", "false"}


def annotate_interactive(
    corpus,
    annotator_id: str,
    batch,
    out_path,
    questions=None,
    in_stream=None,
    out_stream=None,
) -> list[AnnotationRecord]:
    """Prompt the 23 questions for each batch domain and append records.

    Domains already answered by this annotator in ``out_path`` are
    skipped, so an interrupted session resumes where it stopped.
    """
    questions = questions or load_questionnaire()
    in_stream = in_stream if in_stream is not None else sys.stdin
    out_stream = out_stream if out_stream is not None else sys.stdout
    out_path = Path(out_path)
    done: set[str] = set()
    if out_path.exists():
        done = {r.domain_id for r in load_annotations(out_path) if r.annotator_id == annotator_id}
    completed: list[AnnotationRecord] = []
    for domain_id in batch:
        if domain_id in done:
            continue
        domain = corpus.get(domain_id)
        preview = domain.text()[:400]
        print(f"\n=== {domain_id} ({domain.address}) {len(domain.pages)} pages ===", file=out_stream)
        print(preview, file=out_stream)
        answers = []
        for i, question in enumerate(questions, start=1):
            answers.append(_ask(f"[{i}/{len(questions)}] {question} [y/n] ", in_stream, out_stream))
        record = AnnotationRecord(domain_id=domain_id, annotator_id=annotator_id, answers=tuple(answers))
        append_annotation(out_path, record)
        completed.append(record)
    return completed


def _ask(prompt: str, in_stream, out_stream) -> bool:
    while True:
        print(prompt, end="", file=out_stream)
        out_stream.flush()
        line = in_stream.readline()
        if not line:
            raise EOFError("annotation input ended mid-session")
        reply = line.strip().lower()
        if reply in _YES:
            return True
        if reply in _NO:
            return False
        print("please answer y or n", file=out_stream)
