"""Epoch loops for the three models."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from paracontrol.grad import Adam

log = logging.getLogger(__name__)


@dataclass
class TrainHistory:
    epoch_loss: list[float] = field(default_factory=list)
    skipped: int = 0
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {"epoch_loss": self.epoch_loss, "skipped": self.skipped, "seconds": self.seconds}


def bucketed_batches(lengths: Sequence[int], batch_size: int, rng: np.random.Generator,
                     pool: int = 50) -> list[np.ndarray]:
    """Shuffled batches of indices; similar lengths share a batch to cut padding."""
    order = rng.permutation(len(lengths))
    lengths = np.asarray(lengths)
    batches = []
    chunk = batch_size * pool
    for start in range(0, len(order), chunk):
        part = order[start:start + chunk]
        part = part[np.argsort(lengths[part], kind="stable")]
        batches.extend(part[i:i + batch_size] for i in range(0, len(part), batch_size))
    return [batches[i] for i in rng.permutation(len(batches))]


def _run(step: Callable[[np.ndarray], float], lengths, epochs: int, batch_size: int, seed: int,
         min_batch: int = 1, label: str = "") -> TrainHistory:
    rng = np.random.default_rng(seed)
    hist = TrainHistory()
    t0 = time.perf_counter()
    for epoch in range(epochs):
        losses = []
        for idx in bucketed_batches(lengths, batch_size, rng):
            if len(idx) < min_batch:
                continue
            value = step(idx)
            if np.isfinite(value):
                losses.append(value)
            else:
                hist.skipped += 1
        mean = float(np.mean(losses)) if losses else float("nan")
        hist.epoch_loss.append(mean)
        log.info("%s epoch %d/%d loss %.4f", label, epoch + 1, epochs, mean)
    hist.seconds = time.perf_counter() - t0
    return hist


def train_generator(model, src: list[list[int]], tgt: list[list[int]], l_t: np.ndarray,
                    epochs: int, batch_size: int = 40, lr: float = 1e-3, seed: int = 0,
                    clip_norm: float | None = 1.0) -> TrainHistory:
    opt = Adam(model.parameters(), lr, clip_norm=clip_norm)
    lengths = [len(s) + len(t) for s, t in zip(src, tgt)]

    def step(idx):
        return model.train_step([src[i] for i in idx], [tgt[i] for i in idx], l_t[idx], opt)
    return _run(step, lengths, epochs, batch_size, seed, label="generator")


def train_predictor(model, seqs: list[list[int]], targets: np.ndarray, epochs: int,
                    batch_size: int = 40, lr: float = 1e-3, seed: int = 0,
                    clip_norm: float | None = 1.0) -> TrainHistory:
    opt = Adam(model.parameters(), lr, clip_norm=clip_norm)

    def step(idx):
        return model.train_step([seqs[i] for i in idx], targets[idx], opt)
    return _run(step, [len(s) for s in seqs], epochs, batch_size, seed, label="predictor")


def train_semantic(model, src: list[list[int]], tgt: list[list[int]], epochs: int,
                   batch_size: int = 40, lr: float = 1e-3, seed: int = 0,
                   clip_norm: float | None = 1.0) -> TrainHistory:
    if batch_size < 2:
        raise ValueError("in-batch negatives need batch_size >= 2")
    opt = Adam(model.parameters(), lr, clip_norm=clip_norm)

    def step(idx):
        return model.train_step([src[i] for i in idx], [tgt[i] for i in idx], opt)
    return _run(step, [len(s) for s in src], epochs, batch_size, seed, min_batch=2, label="semantic")
