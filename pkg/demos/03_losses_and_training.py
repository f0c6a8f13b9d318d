"""The three ranking losses, their gradients, and a toy training run.

Shows the loss values on a tiny judged list, verifies one analytic
gradient against central finite differences, then trains the scoring
network on an easy planted signal and plots the text-mode learning
curve of validation NDCG@10.

Run:  python demos/03_losses_and_training.py
"""

import numpy as np

from onionrank import TrainConfig, loss_listnet, loss_pointwise, loss_ranknet, train
from onionrank.ltr import JudgedDomain

scores = np.array([2.0, 0.5, 1.0, -0.5])
gains = np.array([23.0, 14.0, 7.0, 0.0])

print("judged list: gains", gains.astype(int).tolist(), "scores", scores.tolist(), "\n")
for name, fn in (("pointwise", loss_pointwise), ("pairwise", loss_ranknet), ("listwise", loss_listnet)):
    loss, grad = fn(scores, gains)
    print(f"{name:9s} loss {loss:8.4f}   gradient {np.round(grad, 4)}")

print("\nfinite-difference check of the listwise gradient:")
step = 1e-5
_, analytic = loss_listnet(scores, gains)
for i in range(scores.size):
    up, down = scores.copy(), scores.copy()
    up[i] += step
    down[i] -= step
    numeric = (loss_listnet(up, gains)[0] - loss_listnet(down, gains)[0]) / (2 * step)
    print(f"  d/ds[{i}]  analytic {analytic[i]:+.6f}   numeric {numeric:+.6f}")

rng = np.random.default_rng(3)
w = rng.uniform(0.5, 1.5, 3)
x = rng.standard_normal((120, 3))
raw = x @ w
planted = np.round(23 * (raw - raw.min()) / (raw.max() - raw.min())).astype(int)
judged = [JudgedDomain(f"d{i:03d}", int(planted[i]), x[i]) for i in range(120)]

model, history = train(
    "listwise", judged[:80], judged[80:], TrainConfig(seed=0, max_epochs=400, patience=50)
)
print(f"\ntrained for {len(history)} epochs; validation NDCG@10 over time:")
for record in history[:: max(1, len(history) // 12)]:
    bar = "#" * int(round(40 * record.val_ndcg10))
    print(f"  epoch {record.epoch:4d}  {record.val_ndcg10:.3f} {bar}")
best = max(h.val_ndcg10 for h in history)
print(f"\nbest validation NDCG@10: {best:.3f}")
