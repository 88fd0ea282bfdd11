"""Attribute predictor: text (hard ids or one-hot rows) -> standardized attributes."""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np

from paracontrol.attrs import K
from paracontrol.grad import backward, ops
from paracontrol.grad.tensor import ShapeError, Tensor
from paracontrol.models.generator import pad_batch
from paracontrol.models.nn import Embedding, Encoder, Linear, Module, masked_mean, padding_bias, sinusoidal_positions

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PredictorConfig:
    vocab_size: int
    d: int = 64
    heads: int = 4
    layers: int = 2
    max_len: int = 64
    seed: int = 1
    n_attrs: int = K

    def to_dict(self) -> dict:
        return asdict(self)


def ste_pass(logits, tokens=None) -> Tensor:
    """Straight-through one-hot of ``logits`` (T, V).

    The forward value is the exact one-hot of ``tokens`` (default: the
    row-wise argmax). The gradient reaches ``logits`` unchanged, as if the
    one-hot were ``logits`` itself.
    """
    logits = logits if isinstance(logits, Tensor) else Tensor(logits)
    if tokens is None:
        tokens = logits.data.argmax(axis=-1)
    tokens = np.asarray(tokens, dtype=np.int64)
    if tokens.shape != logits.shape[:-1]:
        raise ShapeError("ste", logits.shape, tokens.shape)
    hard = np.zeros(logits.shape)
    np.put_along_axis(hard, tokens[..., None], 1.0, axis=-1)
    # hard + (logits - stop_gradient(logits)): the bracket is exactly zero going forward
    return ops.add(hard, ops.sub(logits, ops.detach(logits)))


class Predictor(Module):
    def __init__(self, cfg: PredictorConfig):
        self.cfg = cfg
        rng = np.random.default_rng(cfg.seed)
        self.embed = Embedding(cfg.vocab_size, cfg.d, rng)
        self.encoder = Encoder(cfg.d, cfg.heads, cfg.layers, rng)
        self.head = Linear(cfg.d, cfg.n_attrs, rng)
        self._pos = sinusoidal_positions(cfg.max_len, cfg.d)

    def _from_embeddings(self, x: Tensor, mask: np.ndarray) -> Tensor:
        t = x.shape[1]
        h = self.encoder(ops.add(x, self._pos[:t]), padding_bias(mask))
        return self.head(masked_mean(h, mask))

    def forward_ids(self, seqs: list[list[int]]) -> Tensor:
        if any(len(s) == 0 for s in seqs):
            raise ValueError("predictor input must be non-empty")
        ids, mask = pad_batch([s[: self.cfg.max_len] for s in seqs])
        return self._from_embeddings(self.embed(ids), mask)

    def forward_one_hot(self, rows) -> Tensor:
        """(T, V) one-hot (or STE) rows of a single text -> (k,) prediction."""
        rows = rows if isinstance(rows, Tensor) else Tensor(rows)
        if rows.ndim != 2 or rows.shape[0] == 0 or rows.shape[1] != self.cfg.vocab_size:
            raise ShapeError("predict-attrs", rows.shape, detail=f"expected (T>0, {self.cfg.vocab_size})")
        rows = ops.slice_(rows, slice(0, self.cfg.max_len))
        x = ops.reshape(self.embed.from_one_hot(rows), (1, rows.shape[0], self.cfg.d))
        out = self._from_embeddings(x, np.ones((1, rows.shape[0]), dtype=bool))
        return ops.reshape(out, (self.cfg.n_attrs,))

    def predict_attrs(self, tokens) -> np.ndarray:
        """Predicted standardized attributes of one text given ids or one-hot rows."""
        arr = tokens.data if isinstance(tokens, Tensor) else np.asarray(tokens)
        if arr.ndim == 2 and arr.dtype.kind == "f":
            return self.forward_one_hot(arr).data.copy()
        return self.forward_ids([list(np.asarray(tokens, dtype=np.int64))]).data[0].copy()

    def loss(self, seqs: list[list[int]], targets: np.ndarray) -> Tensor:
        return ops.mse(self.forward_ids(seqs), np.asarray(targets, dtype=np.float64))

    def train_step(self, seqs, targets, optimizer) -> float:
        optimizer.zero_grad()
        loss = self.loss(seqs, targets)
        value = loss.item()
        if not np.isfinite(value):
            log.warning("non-finite predictor loss; step skipped")
            optimizer.skipped += 1
            return float("nan")
        backward(loss, wrt=optimizer.params)
        if not optimizer.step():
            return float("nan")
        return value
