"""The manual judging protocol, scripted end to end.

Builds a balanced three-judge assignment plan, simulates annotators with
disagreements, unifies their answer vectors by per-question majority
voting, and turns the unified vectors into gains.

Run:  python demos/04_annotation_protocol.py
"""

import random

from onionrank import assignment_plan, gain, load_questionnaire, majority_vote
from onionrank.groundtruth import QUESTION_COUNT, AnnotationRecord

questions = load_questionnaire()
print(f"{len(questions)} questions; the first three:")
for q in questions[:3]:
    print(f"  - {q}")

domains = [f"d{i:04d}" for i in range(290)]
annotators = [f"ann{i:02d}" for i in range(13)]
plan = assignment_plan(domains, annotators, seed=1)
assignments = list(plan.assignments())
print(f"\nplan: {len(assignments)} assignments over {len(annotators)} annotators")
batches = [len(b) for rounds in plan.batches.values() for b in rounds]
print(f"batch sizes range {min(batches)}..{max(batches)} (target 23)")

rng = random.Random(5)
truth = [rng.random() < 0.6 for _ in range(QUESTION_COUNT)]
records = []
for name in ("ann00", "ann01", "ann02"):
    noisy = [(not a) if rng.random() < 0.15 else a for a in truth]
    records.append(AnnotationRecord("d0000", name, tuple(noisy)))
    print(f"\n{name} answers: {''.join('y' if a else '.' for a in records[-1].answers)}")

unified = majority_vote(records)
print(f"\nunified:       {''.join('y' if a else '.' for a in unified)}")
print(f"planted:       {''.join('y' if a else '.' for a in truth)}")
print(f"\ngain = {gain(unified)} of a possible {QUESTION_COUNT}")
