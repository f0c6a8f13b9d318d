"""Scoring network and the three ranking losses.

One network serves all three training schemes: two ReLU hidden layers
of 128 and 32 units, each followed by inverted dropout at rate 0.5
during training, and a single linear output. Training is full-batch
gradient descent with early stopping on validation NDCG@10, which keeps
runs bit-deterministic for a fixed seed.

Schemes:

* ``pointwise``  mean squared error against gains scaled to [0, 1]
* ``pairwise``   logistic loss on score differences of ordered pairs
* ``listwise``   cross-entropy between top-one softmax distributions
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, TrainingError
from .features import StandardizationStats
from .graphalg import RankingResult
from .metrics import ndcg_at_k

GAIN_RANGE = 23  # gains are judged on a 0..23 scale
SCHEMES = ("pointwise", "pairwise", "listwise")
DEFAULT_HIDDEN = (128, 32)


@dataclass(frozen=True)
class JudgedDomain:
    """A domain with its ground-truth gain and feature vector."""

    domain_id: str
    gain: int
    features: np.ndarray

    def __post_init__(self):
        if not 0 <= self.gain <= GAIN_RANGE:
            raise ValueError(f"gain {self.gain} outside [0, {GAIN_RANGE}]")


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    max_epochs: int = 2000
    patience: int = 50
    min_delta: float = 1e-4
    dropout: float = 0.5
    seed: int = 0
    init_scale: float = 1.0
    listnet_normalize_gains: bool = False

    def __post_init__(self):
        if self.learning_rate < 0 or self.max_epochs < 1 or self.patience < 1 or self.min_delta < 0:
            raise ConfigError("learning_rate, max_epochs, patience, and min_delta must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError("dropout must be in [0, 1)")


@dataclass
class ModelParams:
    """Weights and biases of the scoring network plus training provenance."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    w3: np.ndarray
    b3: np.ndarray
    seed: int = 0
    scheme: str = ""
    stats: StandardizationStats | None = None
    feature_names: tuple[str, ...] = ()

    @property
    def in_dim(self) -> int:
        return self.w1.shape[0]

    def copy(self) -> "ModelParams":
        return ModelParams(
            w1=self.w1.copy(),
            b1=self.b1.copy(),
            w2=self.w2.copy(),
            b2=self.b2.copy(),
            w3=self.w3.copy(),
            b3=self.b3.copy(),
            seed=self.seed,
            scheme=self.scheme,
            stats=self.stats,
            feature_names=self.feature_names,
        )

    def save(self, path) -> None:
        payload = {
            "dims": [self.in_dim, self.w1.shape[1], self.w2.shape[1], 1],
            "scheme": self.scheme,
            "seed": self.seed,
            "weights": {
                "w1": self.w1.tolist(),
                "b1": self.b1.tolist(),
                "w2": self.w2.tolist(),
                "b2": self.b2.tolist(),
                "w3": self.w3.tolist(),
                "b3": self.b3.tolist(),
            },
            "stats": self.stats.to_jsonable() if self.stats is not None else None,
            "features": list(self.feature_names),
        }
        Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8", newline="\n")

    @classmethod
    def load(cls, path) -> "ModelParams":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        w = data["weights"]
        return cls(
            w1=np.asarray(w["w1"], dtype=float),
            b1=np.asarray(w["b1"], dtype=float),
            w2=np.asarray(w["w2"], dtype=float),
            b2=np.asarray(w["b2"], dtype=float),
            w3=np.asarray(w["w3"], dtype=float),
            b3=np.asarray(w["b3"], dtype=float),
            seed=int(data.get("seed", 0)),
            scheme=str(data.get("scheme", "")),
            stats=StandardizationStats.from_jsonable(data["stats"]) if data.get("stats") else None,
            feature_names=tuple(data.get("features", ())),
        )


def init_params(
    in_dim: int,
    seed: int = 0,
    scale: float = 1.0,
    hidden: tuple[int, int] = DEFAULT_HIDDEN,
) -> ModelParams:
    """Uniform initialization in +-sqrt(6 / (fan_in + fan_out)), scaled."""
    rng = np.random.default_rng(seed)
    h1, h2 = hidden

    def layer(n_in, n_out):
        limit = scale * np.sqrt(6.0 / (n_in + n_out))
        return rng.uniform(-limit, limit, size=(n_in, n_out))

    return ModelParams(
        w1=layer(in_dim, h1),
        b1=np.zeros(h1),
        w2=layer(h1, h2),
        b2=np.zeros(h2),
        w3=layer(h2, 1),
        b3=np.zeros(1),
        seed=seed,
    )


def _forward_batch(params: ModelParams, x: np.ndarray, masks=None):
    """Scores for a batch; with dropout masks when training."""
    z1 = x @ params.w1 + params.b1
    a1 = np.maximum(z1, 0.0)
    d1 = a1 * masks[0] if masks is not None else a1
    z2 = d1 @ params.w2 + params.b2
    a2 = np.maximum(z2, 0.0)
    d2 = a2 * masks[1] if masks is not None else a2
    scores = (d2 @ params.w3 + params.b3).ravel()
    cache = (x, z1, d1, z2, d2, masks)
    return scores, cache


def _backward(params: ModelParams, cache, dscores: np.ndarray):
    x, z1, d1, z2, d2, masks = cache
    ds = dscores.reshape(-1, 1)
    gw3 = d2.T @ ds
    gb3 = ds.sum(axis=0)
    dd2 = ds @ params.w3.T
    da2 = dd2 * masks[1] if masks is not None else dd2
    dz2 = da2 * (z2 > 0.0)
    gw2 = d1.T @ dz2
    gb2 = dz2.sum(axis=0)
    dd1 = dz2 @ params.w2.T
    da1 = dd1 * masks[0] if masks is not None else dd1
    dz1 = da1 * (z1 > 0.0)
    gw1 = x.T @ dz1
    gb1 = dz1.sum(axis=0)
    return gw1, gb1, gw2, gb2, gw3, gb3


def forward(params: ModelParams, features, train_mode: bool = False, rng=None, dropout: float = 0.5) -> float:
    """Score one feature vector. Dropout applies only in train mode."""
    x = np.asarray(features, dtype=float).reshape(1, -1)
    if x.shape[1] != params.in_dim:
        raise ConfigError(f"expected {params.in_dim} features, got {x.shape[1]}")
    masks = None
    if train_mode and dropout > 0.0:
        if rng is None:
            raise ConfigError("train-mode forward needs an rng for dropout")
        keep = 1.0 - dropout
        masks = (
            (rng.random((1, params.w1.shape[1])) < keep) / keep,
            (rng.random((1, params.w2.shape[1])) < keep) / keep,
        )
    scores, _ = _forward_batch(params, x, masks)
    return float(scores[0])


def loss_pointwise(scores, gains):
    """Mean squared error against gains scaled into [0, 1]."""
    s = np.asarray(scores, dtype=float)
    g = np.asarray(gains, dtype=float) / GAIN_RANGE
    if s.size == 0 or s.shape != g.shape:
        raise ConfigError("scores and gains must be equal-length and non-empty")
    diff = s - g
    loss = float(np.mean(diff * diff))
    grad = 2.0 * diff / s.size
    return loss, grad


def loss_ranknet(scores, gains):
    """Mean logistic loss over all strictly ordered pairs.

    With no strictly ordered pair (all gains equal) the loss and
    gradient are zero and a warning flags the degenerate list.
    """
    s = np.asarray(scores, dtype=float)
    g = np.asarray(gains, dtype=float)
    if s.size < 2 or s.shape != g.shape:
        raise ConfigError("pairwise loss needs at least two scored items")
    ordered = g[:, None] > g[None, :]
    pairs = int(ordered.sum())
    if pairs == 0:
        warnings.warn("all gains equal: pairwise loss is identically zero", stacklevel=2)
        return 0.0, np.zeros_like(s)
    diff = s[:, None] - s[None, :]
    # -ln(sigma(d)) = ln(1 + exp(-d)), stable in both tails
    total = float(np.logaddexp(0.0, -diff[ordered]).sum())
    coeff = np.where(ordered, _sigmoid(diff) - 1.0, 0.0)
    grad = coeff.sum(axis=1) - coeff.sum(axis=0)
    return total / pairs, grad / pairs


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    positive = x >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-x[positive]))
    e = np.exp(x[~positive])
    out[~positive] = e / (1.0 + e)
    return out


def loss_listnet(scores, gains, normalize_gains: bool = False):
    """Cross-entropy between top-one softmax distributions of scores and gains."""
    s = np.asarray(scores, dtype=float)
    g = np.asarray(gains, dtype=float)
    if s.size < 2 or s.shape != g.shape:
        raise ConfigError("listwise loss needs at least two scored items")
    if normalize_gains:
        g = g / GAIN_RANGE
    p = _softmax(s)
    q = _softmax(g)
    loss = float(-np.sum(q * np.log(p)))
    return loss, p - q


def _softmax(x: np.ndarray) -> np.ndarray:
    shifted = x - np.max(x)
    e = np.exp(shifted)
    return e / e.sum()


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    loss: float
    val_ndcg10: float


def write_history_csv(history, path) -> None:
    lines = ["epoch,loss,val_ndcg10"]
    for rec in history:
        lines.append(f"{rec.epoch},{rec.loss:.17g},{rec.val_ndcg10:.17g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _loss_for(scheme: str, config: TrainConfig):
    if scheme == "pointwise":
        return loss_pointwise
    if scheme == "pairwise":
        return loss_ranknet
    if scheme == "listwise":
        return lambda s, g: loss_listnet(s, g, normalize_gains=config.listnet_normalize_gains)
    raise ConfigError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def _val_ndcg10(params: ModelParams, ids, x: np.ndarray, gains: dict) -> float:
    scores, _ = _forward_batch(params, x)
    order = [d for d, _ in sorted(zip(ids, scores), key=lambda kv: (-kv[1], kv[0]))]
    return ndcg_at_k(order, gains, 10)


def train(scheme: str, train_set, val_set, config: TrainConfig | None = None, stats=None):
    """Fit the network under a scheme; returns (best params, epoch history).

    Full-batch updates; after each epoch the validation NDCG@10 is
    computed with dropout off, and the parameters with the best value are
    kept. Training stops when no improvement beyond ``min_delta`` is seen
    for ``patience`` consecutive epochs.
    """
    config = config or TrainConfig()
    train_set = list(train_set)
    val_set = list(val_set)
    if not train_set or not val_set:
        raise ConfigError("train and validation sets must be non-empty")
    overlap = {d.domain_id for d in train_set} & {d.domain_id for d in val_set}
    if overlap:
        raise ConfigError(f"train/validation overlap: {sorted(overlap)[:3]}")

    x = np.asarray([d.features for d in train_set], dtype=float)
    g = np.asarray([d.gain for d in train_set], dtype=float)
    val_ids = [d.domain_id for d in val_set]
    val_x = np.asarray([d.features for d in val_set], dtype=float)
    val_gains = {d.domain_id: d.gain for d in val_set}

    loss_fn = _loss_for(scheme, config)
    params = init_params(x.shape[1], seed=config.seed, scale=config.init_scale)
    params.scheme = scheme
    params.stats = stats
    rng = np.random.default_rng(config.seed)
    keep = 1.0 - config.dropout

    best: ModelParams | None = None
    best_ndcg = -np.inf
    stale = 0
    history: list[EpochRecord] = []
    n = x.shape[0]

    for epoch in range(1, config.max_epochs + 1):
        masks = None
        if config.dropout > 0.0:
            masks = (
                (rng.random((n, params.w1.shape[1])) < keep) / keep,
                (rng.random((n, params.w2.shape[1])) < keep) / keep,
            )
        scores, cache = _forward_batch(params, x, masks)
        loss, dscores = loss_fn(scores, g)
        if not np.isfinite(loss):
            raise TrainingError(f"non-finite {scheme} loss at epoch {epoch}")
        gw1, gb1, gw2, gb2, gw3, gb3 = _backward(params, cache, dscores)
        lr = config.learning_rate
        params.w1 -= lr * gw1
        params.b1 -= lr * gb1
        params.w2 -= lr * gw2
        params.b2 -= lr * gb2
        params.w3 -= lr * gw3
        params.b3 -= lr * gb3

        val_ndcg = _val_ndcg10(params, val_ids, val_x, val_gains)
        history.append(EpochRecord(epoch=epoch, loss=loss, val_ndcg10=val_ndcg))
        if val_ndcg > best_ndcg + config.min_delta:
            best_ndcg = val_ndcg
            best = params.copy()
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                break

    if best is None:
        best = params.copy()
    best.scheme = scheme
    best.stats = stats
    return best, history


def predict_rank(model: ModelParams, domains) -> RankingResult:
    """Deterministic ranking of domains by evaluation-mode score.

    Ties break by ascending domain id.
    """
    domains = list(domains)
    if not domains:
        return RankingResult(entries=())
    x = np.asarray([d.features for d in domains], dtype=float)
    if x.shape[1] != model.in_dim:
        raise ConfigError(f"model expects {model.in_dim} features, got {x.shape[1]}")
    scores, _ = _forward_batch(model, x)
    return RankingResult.from_scores({d.domain_id: float(s) for d, s in zip(domains, scores)})
