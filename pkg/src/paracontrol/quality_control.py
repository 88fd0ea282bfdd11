"""Inference-time refinement of source embeddings toward target attributes.

The loop works on any object implementing :class:`QCSystem`. The real one
wraps the frozen generator, attribute predictor and semantic classifier;
tests plug in small analytic systems.

Each outer iteration takes one gradient of the attribute loss with respect
to the source embeddings and then searches step sizes upward from ``eta0``
(multiplying by ``gamma``) until a candidate both lowers the loss and passes
the semantic gate, or ``patience`` candidates have failed.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Protocol

import numpy as np

from paracontrol.grad import backward, ops
from paracontrol.grad.tensor import Tensor
from paracontrol.models.generator import EOS
from paracontrol.models.predictor import ste_pass

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class QCConfig:
    eta0: float = 1e3
    gamma: float = 2.25
    tau: float = 0.95
    patience: int = 4
    max_iters: int = 100

    def __post_init__(self):
        if not self.eta0 > 0:
            raise ValueError(f"eta0 must be positive, got {self.eta0}")
        if not self.gamma > 1:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if not 0 < self.tau <= 1:
            raise ValueError(f"tau must lie in (0, 1], got {self.tau}")
        if self.patience < 1:
            raise ValueError("patience must be at least 1")
        if self.max_iters < 0:
            raise ValueError("max_iters must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "QCConfig":
        return cls(**d)


class QCSystem(Protocol):
    def initial(self) -> np.ndarray: ...
    def generate(self, theta: np.ndarray) -> Any: ...
    def loss(self, output) -> float: ...
    def loss_and_grad(self, theta: np.ndarray, output) -> tuple[float, np.ndarray]: ...
    def semantic(self, output) -> float: ...


@dataclass
class Candidate:
    theta: np.ndarray
    output: Any
    loss: float
    semantic: float
    eta: float


@dataclass
class TraceEntry:
    iteration: int
    loss: float
    grad_norm: float
    tried: list[dict] = field(default_factory=list)
    accepted: bool = False
    eta: float | None = None


def adaptive_step_search(theta: np.ndarray, grad: np.ndarray, loss0: float, cfg: QCConfig,
                         system: QCSystem, tried: list[dict] | None = None) -> Candidate | None:
    """Smallest step ``eta0 * gamma**j`` (j < patience) that lowers the loss and passes the gate."""
    eta = cfg.eta0
    for _ in range(cfg.patience):
        cand = theta - eta * grad
        output = system.generate(cand)
        loss = system.loss(output)
        sem = system.semantic(output) if loss < loss0 else float("nan")
        ok = bool(loss < loss0 and sem >= cfg.tau)
        if tried is not None:
            tried.append({"eta": eta, "loss": loss, "semantic": None if math.isnan(sem) else sem,
                          "accepted": ok})
        if ok:
            return Candidate(cand, output, loss, sem, eta)
        eta *= cfg.gamma
    return None


@dataclass
class GenerationResult:
    output: Any
    predicted_attrs: np.ndarray | None
    mse_before: float
    mse_after: float
    semantic: float | None
    accepted_steps: int
    trace: list[TraceEntry]
    stop_reason: str
    chosen_step: int = 0

    def loss_path(self) -> list[float]:
        """Loss of the current output at the start of each iteration."""
        return [t.loss for t in self.trace]

    def to_dict(self) -> dict:
        out = self.output
        if isinstance(out, np.ndarray):
            out = out.tolist()
        return {
            "output": out,
            "predicted_attrs": None if self.predicted_attrs is None else self.predicted_attrs.tolist(),
            "mse_before": self.mse_before,
            "mse_after": self.mse_after,
            "semantic": self.semantic,
            "accepted_steps": self.accepted_steps,
            "chosen_step": self.chosen_step,
            "stop_reason": self.stop_reason,
            "trace": [asdict(t) for t in self.trace],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), default=float)


def qc_generate(system: QCSystem, cfg: QCConfig,
                measure: Callable[[Any], float] | None = None) -> GenerationResult:
    """Refine the source embeddings of ``system`` and return the best generation.

    ``measure`` scores an output by the quantity reported to users (for the
    model system, the attribute MSE of the decoded text). When given, the
    returned output is the best-measured one among the initial generation
    and every accepted step, so the reported error never rises. Without it,
    the last accepted generation is returned.
    """
    theta = np.array(system.initial(), dtype=np.float64)
    output = system.generate(theta)
    history = [output]
    semantics: list[float | None] = [None]
    trace: list[TraceEntry] = []
    reason = "max_iters"
    for it in range(cfg.max_iters):
        loss, grad = system.loss_and_grad(theta, output)
        gnorm = float(np.linalg.norm(grad)) if np.all(np.isfinite(grad)) else float("nan")
        entry = TraceEntry(it, float(loss), gnorm)
        trace.append(entry)
        if not (math.isfinite(loss) and math.isfinite(gnorm)):
            reason = "non_finite"
            break
        cand = adaptive_step_search(theta, grad, loss, cfg, system, entry.tried)
        if cand is None:
            reason = "no_improvement"
            break
        entry.accepted = True
        entry.eta = cand.eta
        theta, output = cand.theta, cand.output
        history.append(output)
        semantics.append(cand.semantic)
    accepted = len(history) - 1
    if measure is not None:
        scores = [measure(o) for o in history]
        best = int(np.argmin(scores))  # first minimum keeps the earlier output on ties
        before, after = scores[0], scores[best]
    else:
        best = accepted
        before = trace[0].loss if trace else system.loss(history[0])
        after = system.loss(history[best])
    predicted = getattr(system, "predicted", None)
    return GenerationResult(
        output=history[best],
        predicted_attrs=predicted(history[best]) if predicted else None,
        mse_before=float(before),
        mse_after=float(after),
        semantic=semantics[best],
        accepted_steps=accepted,
        trace=trace,
        stop_reason=reason,
        chosen_step=best,
    )


class QuadraticSystem:
    """``loss(theta) = ||theta - optimum||^2`` with the output equal to ``theta``.

    ``gate`` decides semantic scores; by default every candidate passes.
    """

    def __init__(self, start, optimum, gate: Callable[[np.ndarray], float] | None = None):
        self.start = np.asarray(start, dtype=np.float64)
        self.optimum = np.asarray(optimum, dtype=np.float64)
        self.gate = gate or (lambda _out: 1.0)

    def initial(self):
        return self.start.copy()

    def generate(self, theta):
        return np.array(theta, dtype=np.float64)

    def loss(self, output):
        d = output - self.optimum
        return float(np.sum(d * d))

    def loss_and_grad(self, theta, output):
        return self.loss(output), 2.0 * (theta - self.optimum)

    def semantic(self, output):
        return float(self.gate(output))


class ModelQCSystem:
    """QC over a frozen generator, attribute predictor and semantic classifier for one source.

    ``l_t`` is the standardized target used by the predictor loss and
    ``condition`` the vector fed to the generator.
    """

    def __init__(self, generator, predictor, semantic, source: list[int], l_t, condition=None,
                 max_len: int | None = None):
        if not source:
            raise ValueError("source must be non-empty")
        self.g, self.lp, self.se = generator, predictor, semantic
        self.source = list(source)[: generator.cfg.max_len]
        self.l_t = np.asarray(l_t, dtype=np.float64)
        self.condition = condition if condition is not None else self.l_t
        self.max_len = max_len
        self._cache: dict[tuple, float] = {}

    @staticmethod
    def body(output: list[int]) -> list[int]:
        return output[:-1] if output and output[-1] == EOS else list(output)

    def initial(self):
        return self.g.source_embeddings(np.asarray([self.source])).data[0].copy()

    def generate(self, theta):
        return self.g.generate_from_embeddings(theta, self.condition, self.max_len)

    def predicted(self, output) -> np.ndarray | None:
        body = self.body(output)
        return self.lp.predict_attrs(body) if body else None

    def loss(self, output):
        key = tuple(output)
        if key not in self._cache:
            pred = self.predicted(output)
            self._cache[key] = math.inf if pred is None else float(np.sum((pred - self.l_t) ** 2))
        return self._cache[key]

    def loss_and_grad(self, theta, output):
        body = self.body(output)
        if not body:
            return math.inf, np.zeros_like(theta)
        th = Tensor(theta, requires_grad=True)
        logits = self.g.forced_logits_from_embeddings(th, self.condition, body)
        rows = ste_pass(ops.slice_(logits, slice(0, len(body))), body)
        diff = ops.sub(self.lp.forward_one_hot(rows), self.l_t)
        loss = ops.sum_(ops.mul(diff, diff))
        backward(loss, wrt=[th])
        return loss.item(), th.grad

    def semantic(self, output):
        body = self.body(output)
        return self.se.score(self.source, body) if body else 0.0
