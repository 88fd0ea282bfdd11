"""Semantic equivalence classifier trained with in-batch negatives."""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np

from paracontrol.grad import backward, no_grad, ops
from paracontrol.grad.tensor import Tensor
from paracontrol.models.generator import pad_batch
from paracontrol.models.nn import Embedding, Encoder, Linear, Module, masked_mean, padding_bias, sinusoidal_positions

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SemConfig:
    vocab_size: int
    d: int = 64
    heads: int = 4
    layers: int = 2
    max_len: int = 64
    temperature: float = 0.1
    seed: int = 2

    def to_dict(self) -> dict:
        return asdict(self)


def contrastive_loss(scores) -> Tensor:
    """Mean over rows of -log softmax(scores[i])[i] for an (m, m) score matrix.

    Row ``i`` holds the compatibility of source ``i`` with every target in
    the batch; the diagonal entry is the true pair and sits in the
    denominator together with the ``m - 1`` negatives.
    """
    scores = scores if isinstance(scores, Tensor) else Tensor(scores)
    if scores.ndim != 2 or scores.shape[0] != scores.shape[1]:
        raise ValueError(f"expected a square score matrix, got {scores.shape}")
    m = scores.shape[0]
    if m < 2:
        raise ValueError("contrastive loss needs a batch of at least 2 pairs")
    diag = ops.slice_(ops.log_softmax(scores), (np.arange(m), np.arange(m)))
    return ops.mul(ops.sum_(diag), -1.0 / m)


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def fit_logistic(x: np.ndarray, y: np.ndarray, l2: float = 1e-3, iters: int = 50) -> tuple[float, float]:
    """Slope and intercept of a one-feature logistic regression (Newton's method).

    The small ridge term keeps the fit finite when the classes separate.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    X = np.stack([x, np.ones_like(x)], axis=1)
    w = np.zeros(2)
    reg = np.diag([l2, 0.0]) * len(x)
    for _ in range(iters):
        p = _sigmoid(X @ w)
        grad = X.T @ (p - y) + reg @ w
        hess = X.T @ (X * (p * (1 - p))[:, None]) + reg + 1e-9 * np.eye(2)
        step = np.linalg.solve(hess, grad)
        w -= step
        if np.max(np.abs(step)) < 1e-10:
            break
    return float(w[0]), float(w[1])


class SemClassifier(Module):
    def __init__(self, cfg: SemConfig):
        self.cfg = cfg
        rng = np.random.default_rng(cfg.seed)
        self.embed = Embedding(cfg.vocab_size, cfg.d, rng)
        self.encoder = Encoder(cfg.d, cfg.heads, cfg.layers, rng)
        self.proj = Linear(cfg.d, cfg.d, rng)
        self._pos = sinusoidal_positions(cfg.max_len, cfg.d)
        # logistic calibration of the cosine similarity
        self.slope = 1.0 / cfg.temperature
        self.intercept = 0.0

    def encode(self, seqs: list[list[int]]) -> Tensor:
        """Unit-length sentence vectors (B, d)."""
        if any(len(s) == 0 for s in seqs):
            raise ValueError("semantic classifier input must be non-empty")
        ids, mask = pad_batch([s[: self.cfg.max_len] for s in seqs])
        h = self.encoder(ops.add(self.embed(ids), self._pos[: ids.shape[1]]), padding_bias(mask))
        z = self.proj(masked_mean(h, mask))
        norm = ops.sqrt(ops.add(ops.sum_(ops.mul(z, z), axis=-1, keepdims=True), 1e-12))
        return ops.div(z, norm)

    def similarity_matrix(self, src: list[list[int]], tgt: list[list[int]]) -> Tensor:
        u, v = self.encode(src), self.encode(tgt)
        return ops.matmul(u, ops.transpose(v))

    def loss(self, src, tgt) -> Tensor:
        return contrastive_loss(ops.mul(self.similarity_matrix(src, tgt), 1.0 / self.cfg.temperature))

    def train_step(self, src, tgt, optimizer) -> float:
        optimizer.zero_grad()
        loss = self.loss(src, tgt)
        value = loss.item()
        if not np.isfinite(value):
            log.warning("non-finite semantic loss; step skipped")
            optimizer.skipped += 1
            return float("nan")
        backward(loss, wrt=optimizer.params)
        if not optimizer.step():
            return float("nan")
        return value

    def cosine(self, src: list[list[int]], tgt: list[list[int]]) -> np.ndarray:
        """Row-wise cosine similarity of aligned pairs."""
        with no_grad():
            u, v = self.encode(src).data, self.encode(tgt).data
        return (u * v).sum(axis=1)

    def calibrate(self, positives: tuple[list, list], negatives: tuple[list, list]) -> None:
        pos = self.cosine(*positives)
        neg = self.cosine(*negatives)
        x = np.concatenate([pos, neg])
        y = np.concatenate([np.ones(len(pos)), np.zeros(len(neg))])
        self.slope, self.intercept = fit_logistic(x, y)

    def score_batch(self, src: list[list[int]], tgt: list[list[int]]) -> np.ndarray:
        """Calibrated probability that each (src, tgt) pair is a paraphrase."""
        return _sigmoid(self.slope * self.cosine(src, tgt) + self.intercept)

    def score(self, src: list[int], tgt: list[int]) -> float:
        return float(self.score_batch([src], [tgt])[0])

    def calibration(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept}

    def set_calibration(self, d: dict) -> None:
        self.slope = float(d["slope"])
        self.intercept = float(d["intercept"])

