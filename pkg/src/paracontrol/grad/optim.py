"""SGD and Adam over lists of leaf tensors."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from paracontrol.grad.tensor import Tensor

log = logging.getLogger(__name__)


@dataclass
class AdamState:
    step: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)


def optimizer_step(params: list[Tensor], grads: list[np.ndarray | None], lr: float,
                   kind: str = "sgd", state: AdamState | None = None,
                   betas=(0.9, 0.999), eps: float = 1e-8) -> bool:
    """Update ``params`` in place. Returns False (and leaves them untouched)
    when any gradient is non-finite. ``state`` carries Adam moments between calls."""
    if len(params) != len(grads):
        raise ValueError(f"optimizer_step: {len(params)} params but {len(grads)} grads")
    if kind not in ("sgd", "adam"):
        raise ValueError(f"optimizer_step: unknown kind {kind!r}")
    for p, g in zip(params, grads):
        if g is not None and g.shape != p.shape:
            raise ValueError(f"optimizer_step: grad shape {g.shape} != param shape {p.shape}")
        if g is not None and not np.all(np.isfinite(g)):
            log.warning("skipping optimizer step: non-finite gradient for %s", p.name or p.shape)
            return False
    if kind == "sgd":
        for p, g in zip(params, grads):
            if g is not None:
                p.data -= lr * g
        return True
    if state is None:
        raise ValueError("optimizer_step: adam needs an AdamState")
    if not state.m:
        state.m = [np.zeros_like(p.data) for p in params]
        state.v = [np.zeros_like(p.data) for p in params]
    state.step += 1
    b1, b2 = betas
    c1 = 1.0 - b1 ** state.step
    c2 = 1.0 - b2 ** state.step
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if g is None:
            continue
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        p.data -= lr * (m / c1) / (np.sqrt(v / c2) + eps)
    return True


class Optimizer:
    kind = "sgd"

    def __init__(self, params: list[Tensor], lr: float, clip_norm: float | None = None):
        self.params = list(params)
        self.lr = lr
        self.clip_norm = clip_norm
        self.skipped = 0
        self.state = AdamState() if self.kind == "adam" else None

    def step(self, grads: list[np.ndarray | None] | None = None) -> bool:
        if grads is None:
            grads = [p.grad for p in self.params]
        if self.clip_norm is not None:
            norm = np.sqrt(sum(float((g * g).sum()) for g in grads if g is not None))
            if np.isfinite(norm) and norm > self.clip_norm:
                grads = [None if g is None else g * (self.clip_norm / norm) for g in grads]
        ok = optimizer_step(self.params, grads, self.lr, self.kind, self.state)
        if not ok:
            self.skipped += 1
        return ok

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None


class SGD(Optimizer):
    kind = "sgd"


class Adam(Optimizer):
    kind = "adam"
