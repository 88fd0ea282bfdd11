"""Transformer building blocks on top of :mod:`paracontrol.grad`."""
from __future__ import annotations

import math

import numpy as np

from paracontrol.grad import ops
from paracontrol.grad.tensor import Tensor

# additive attention bias for masked positions; finite so that fast-math kernels stay exact
MASK_VALUE = -1e9


class Module:
    """Parameter container; parameters and sub-modules are discovered from attributes."""

    def named_parameters(self, prefix: str = "") -> dict[str, Tensor]:
        out: dict[str, Tensor] = {}
        for name, value in vars(self).items():
            if isinstance(value, Tensor) and value.requires_grad:
                out[prefix + name] = value
            elif isinstance(value, Module):
                out.update(value.named_parameters(f"{prefix}{name}."))
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        out.update(item.named_parameters(f"{prefix}{name}.{i}."))
        return out

    def parameters(self) -> list[Tensor]:
        return list(self.named_parameters().values())

    def state_dict(self) -> dict[str, np.ndarray]:
        return {k: v.data.copy() for k, v in self.named_parameters().items()}

    def load_state_dict(self, state: dict[str, np.ndarray]) -> None:
        params = self.named_parameters()
        missing = set(params) - set(state)
        extra = set(state) - set(params)
        if missing or extra:
            raise KeyError(f"state mismatch: missing {sorted(missing)}, unexpected {sorted(extra)}")
        for k, p in params.items():
            value = np.asarray(state[k], dtype=np.float64)
            if value.shape != p.shape:
                raise ValueError(f"{k}: expected shape {p.shape}, got {value.shape}")
            p.data[...] = value


def _param(rng: np.random.Generator, shape, scale: float, name: str) -> Tensor:
    return Tensor(rng.normal(0.0, scale, size=shape), requires_grad=True, name=name)


class Linear(Module):
    def __init__(self, d_in: int, d_out: int, rng: np.random.Generator, bias: bool = True):
        self.weight = _param(rng, (d_in, d_out), 1.0 / math.sqrt(d_in), "weight")
        self.bias = Tensor(np.zeros(d_out), requires_grad=True, name="bias") if bias else None

    def __call__(self, x) -> Tensor:
        y = ops.matmul(x, self.weight)
        return ops.add(y, self.bias) if self.bias is not None else y


class LayerNorm(Module):
    def __init__(self, d: int):
        self.gamma = Tensor(np.ones(d), requires_grad=True, name="gamma")
        self.beta = Tensor(np.zeros(d), requires_grad=True, name="beta")

    def __call__(self, x) -> Tensor:
        return ops.layer_norm(x, self.gamma, self.beta)


class Embedding(Module):
    def __init__(self, vocab: int, d: int, rng: np.random.Generator):
        self.weight = _param(rng, (vocab, d), 1.0, "weight")

    def __call__(self, ids) -> Tensor:
        return ops.embedding(self.weight, ids)

    def from_one_hot(self, rows) -> Tensor:
        """Soft lookup: ``rows @ weight`` for (…, vocab) rows."""
        return ops.matmul(rows, self.weight)


def sinusoidal_positions(n: int, d: int) -> np.ndarray:
    pos = np.arange(n)[:, None]
    i = np.arange(d // 2)[None, :]
    angle = pos / np.power(10000.0, 2 * i / d)
    out = np.zeros((n, d))
    out[:, 0::2] = np.sin(angle)
    out[:, 1::2] = np.cos(angle)
    return out


def padding_bias(mask: np.ndarray) -> np.ndarray:
    """(B, T) boolean keep-mask -> (B, 1, 1, T) additive attention bias."""
    return np.where(mask, 0.0, MASK_VALUE)[:, None, None, :]


def causal_bias(t: int) -> np.ndarray:
    return np.triu(np.full((t, t), MASK_VALUE), k=1)[None, None]


class MultiHeadAttention(Module):
    def __init__(self, d: int, heads: int, rng: np.random.Generator):
        if d % heads:
            raise ValueError(f"model width {d} is not divisible by {heads} heads")
        self.heads = heads
        self.q = Linear(d, d, rng)
        self.k = Linear(d, d, rng)
        self.v = Linear(d, d, rng)
        self.o = Linear(d, d, rng)

    def _split(self, x: Tensor) -> Tensor:
        b, t, d = x.shape
        return ops.transpose(ops.reshape(x, (b, t, self.heads, d // self.heads)), (0, 2, 1, 3))

    def __call__(self, x, memory, bias: np.ndarray | None) -> Tensor:
        b, t, d = x.shape
        q = self._split(self.q(x))
        k = self._split(self.k(memory))
        v = self._split(self.v(memory))
        scores = ops.mul(ops.matmul(q, ops.transpose(k, (0, 1, 3, 2))), 1.0 / math.sqrt(d // self.heads))
        ctx = ops.matmul(ops.softmax(scores, bias), v)
        return self.o(ops.reshape(ops.transpose(ctx, (0, 2, 1, 3)), (b, t, d)))


class FeedForward(Module):
    def __init__(self, d: int, hidden: int, rng: np.random.Generator):
        self.up = Linear(d, hidden, rng)
        self.down = Linear(hidden, d, rng)

    def __call__(self, x) -> Tensor:
        return self.down(ops.gelu(self.up(x)))


class EncoderLayer(Module):
    def __init__(self, d: int, heads: int, rng: np.random.Generator):
        self.ln1 = LayerNorm(d)
        self.attn = MultiHeadAttention(d, heads, rng)
        self.ln2 = LayerNorm(d)
        self.ff = FeedForward(d, 4 * d, rng)

    def __call__(self, x, bias) -> Tensor:
        h = self.ln1(x)
        x = ops.add(x, self.attn(h, h, bias))
        return ops.add(x, self.ff(self.ln2(x)))


class DecoderLayer(Module):
    def __init__(self, d: int, heads: int, rng: np.random.Generator):
        self.ln1 = LayerNorm(d)
        self.self_attn = MultiHeadAttention(d, heads, rng)
        self.ln2 = LayerNorm(d)
        self.cross_attn = MultiHeadAttention(d, heads, rng)
        self.ln3 = LayerNorm(d)
        self.ff = FeedForward(d, 4 * d, rng)

    def __call__(self, y, memory, self_bias, memory_bias) -> Tensor:
        h = self.ln1(y)
        y = ops.add(y, self.self_attn(h, h, self_bias))
        y = ops.add(y, self.cross_attn(self.ln2(y), memory, memory_bias))
        return ops.add(y, self.ff(self.ln3(y)))


class Encoder(Module):
    def __init__(self, d: int, heads: int, layers: int, rng: np.random.Generator):
        self.layers = [EncoderLayer(d, heads, rng) for _ in range(layers)]
        self.ln = LayerNorm(d)

    def __call__(self, x, bias) -> Tensor:
        for layer in self.layers:
            x = layer(x, bias)
        return self.ln(x)


def masked_mean(x: Tensor, mask: np.ndarray) -> Tensor:
    """Mean over the time axis of (B, T, d) ``x`` counting only kept positions."""
    m = mask.astype(np.float64)
    weights = (m / np.maximum(m.sum(axis=1, keepdims=True), 1.0))[:, :, None]
    return ops.sum_(ops.mul(x, weights), axis=1)
