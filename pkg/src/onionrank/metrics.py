"""Discounted cumulative gain metrics.

The discount puts full weight on the first two positions: position 1 is
the undiscounted leading term and position 2 divides by log2(2) = 1.
"""

from __future__ import annotations

import math


def dcg_at_k(gains, k: int) -> float:
    """DCG of gains already arranged in predicted order, truncated at k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    gains = list(gains)
    if not gains:
        raise ValueError("gains must be non-empty")
    k = min(k, len(gains))
    total = float(gains[0])
    for i in range(2, k + 1):
        total += gains[i - 1] / math.log2(i)
    return total


def ndcg_at_k(predicted_order, truth_gains, k: int) -> float:
    """DCG of the predicted order divided by the ideal DCG of the same items.

    Returns 0.0 for the degenerate all-zero-gain case, where no order is
    better than any other.
    """
    gains = [float(truth_gains[d]) for d in predicted_order]
    ideal = sorted(gains, reverse=True)
    idcg = dcg_at_k(ideal, k)
    if idcg == 0.0:
        return 0.0
    return dcg_at_k(gains, k) / idcg
