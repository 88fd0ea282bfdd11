"""Attribute-conditioned encoder-decoder paraphrase generator."""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np

from paracontrol.attrs import K
from paracontrol.grad import backward, no_grad, ops
from paracontrol.grad.tensor import ShapeError, Tensor
from paracontrol.models.nn import (
    DecoderLayer,
    Embedding,
    Encoder,
    LayerNorm,
    Linear,
    Module,
    causal_bias,
    padding_bias,
    sinusoidal_positions,
)

log = logging.getLogger(__name__)

BOS, EOS, PAD = 1, 2, 0


@dataclass(frozen=True)
class GeneratorConfig:
    vocab_size: int
    d: int = 64
    heads: int = 4
    encoder_layers: int = 2
    decoder_layers: int = 2
    max_len: int = 64
    seed: int = 0
    conditioned: bool = True
    n_attrs: int = K

    def __post_init__(self):
        if self.d % self.heads:
            raise ValueError(f"d={self.d} must be divisible by heads={self.heads}")
        if self.max_len < 2:
            raise ValueError("max_len must leave room for begin and end markers")

    def to_dict(self) -> dict:
        return asdict(self)


def pad_batch(seqs, pad: int = PAD) -> tuple[np.ndarray, np.ndarray]:
    """Right-pad integer sequences; returns (ids, keep-mask)."""
    width = max(1, max(len(s) for s in seqs))
    ids = np.full((len(seqs), width), pad, dtype=np.int64)
    mask = np.zeros((len(seqs), width), dtype=bool)
    for i, s in enumerate(seqs):
        ids[i, :len(s)] = s
        mask[i, :len(s)] = True
    return ids, mask


class Generator(Module):
    def __init__(self, cfg: GeneratorConfig):
        self.cfg = cfg
        rng = np.random.default_rng(cfg.seed)
        self.embed = Embedding(cfg.vocab_size, cfg.d, rng)
        self.encoder = Encoder(cfg.d, cfg.heads, cfg.encoder_layers, rng)
        self.decoder = [DecoderLayer(cfg.d, cfg.heads, rng) for _ in range(cfg.decoder_layers)]
        self.decoder_ln = LayerNorm(cfg.d)
        self.out = Linear(cfg.d, cfg.vocab_size, rng)
        # LE: attribute vector -> model width, added to the first decoder input
        self.le = Linear(cfg.n_attrs, cfg.d, rng) if cfg.conditioned else None
        self._pos = sinusoidal_positions(cfg.max_len + 1, cfg.d)

    # ----------------------------------------------------------------- pieces
    def source_embeddings(self, src_ids: np.ndarray) -> Tensor:
        return self.embed(self._clip(src_ids))

    def _clip(self, ids: np.ndarray) -> np.ndarray:
        return ids[..., : self.cfg.max_len]

    def encode(self, theta, src_mask: np.ndarray) -> Tensor:
        t = theta.shape[1]
        return self.encoder(ops.add(theta, self._pos[:t]), padding_bias(src_mask[:, :t]))

    def fuse_attributes(self, y, l_t) -> Tensor:
        """Add LE(l_t) to decoder position 0; later positions pass through untouched."""
        y = y if isinstance(y, Tensor) else Tensor(y)
        if self.le is None:
            return y
        l_t = np.asarray(l_t, dtype=np.float64)
        b, t, d = y.shape
        if l_t.shape != (b, self.cfg.n_attrs):
            raise ShapeError("fuse-attributes", y.shape, l_t.shape,
                             detail=f"expected attributes of shape ({b}, {self.cfg.n_attrs})")
        first = ops.add(ops.slice_(y, (slice(None), slice(0, 1))), ops.reshape(self.le(l_t), (b, 1, d)))
        if t == 1:
            return first
        return ops.concat([first, ops.slice_(y, (slice(None), slice(1, None)))], axis=1)

    def decode(self, memory, src_mask: np.ndarray, dec_in: np.ndarray, l_t) -> Tensor:
        """Logits (B, T, V) for decoder inputs ``dec_in`` (begin marker first)."""
        t = dec_in.shape[1]
        y = ops.add(self.embed(dec_in), self._pos[:t])
        y = self.fuse_attributes(y, l_t)
        self_bias = causal_bias(t)
        mem_bias = padding_bias(src_mask[:, : memory.shape[1]])
        for layer in self.decoder:
            y = layer(y, memory, self_bias, mem_bias)
        return self.out(self.decoder_ln(y))

    # --------------------------------------------------------------- training
    def teacher_forced(self, src: list[list[int]], tgt: list[list[int]]):
        src_ids, src_mask = pad_batch([s[: self.cfg.max_len] for s in src])
        body = [t[: self.cfg.max_len - 1] for t in tgt]
        dec_in, _ = pad_batch([[BOS] + t for t in body])
        dec_out, out_mask = pad_batch([t + [EOS] for t in body])
        return src_ids, src_mask, dec_in, dec_out, out_mask

    def loss(self, src: list[list[int]], tgt: list[list[int]], l_t) -> Tensor:
        """Mean token cross-entropy with teacher forcing."""
        src_ids, src_mask, dec_in, dec_out, out_mask = self.teacher_forced(src, tgt)
        memory = self.encode(self.source_embeddings(src_ids), src_mask)
        logits = self.decode(memory, src_mask, dec_in, l_t)
        return ops.cross_entropy(logits, dec_out, out_mask.astype(np.float64))

    def train_step(self, src, tgt, l_t, optimizer) -> float:
        """One optimizer update; returns the loss, or NaN when the step was skipped."""
        optimizer.zero_grad()
        loss = self.loss(src, tgt, l_t)
        value = loss.item()
        if not np.isfinite(value):
            log.warning("non-finite generator loss; step skipped")
            optimizer.skipped += 1
            return float("nan")
        backward(loss, wrt=optimizer.params)
        if not optimizer.step():
            return float("nan")
        return value

    # --------------------------------------------------------------- decoding
    def _greedy(self, memory, src_mask, l_t, max_len: int) -> list[list[int]]:
        b = memory.shape[0]
        dec_in = np.full((b, 1), BOS, dtype=np.int64)
        done = np.zeros(b, dtype=bool)
        outputs: list[list[int]] = [[] for _ in range(b)]
        steps = min(max_len, self.cfg.max_len)
        for _ in range(steps):
            logits = self.decode(memory, src_mask, dec_in, l_t).data[:, -1]
            nxt = logits.argmax(axis=-1)
            for i in np.flatnonzero(~done):
                outputs[i].append(int(nxt[i]))
            done |= nxt == EOS
            if done.all():
                break
            dec_in = np.concatenate([dec_in, nxt[:, None]], axis=1)
        return outputs

    def _attrs(self, l_t, b: int):
        if self.le is None:
            return None
        l_t = np.asarray(l_t, dtype=np.float64)
        return np.broadcast_to(l_t, (b, self.cfg.n_attrs)) if l_t.ndim == 1 else l_t

    def generate_batch(self, src: list[list[int]], l_t, max_len: int | None = None) -> list[list[int]]:
        """Greedy decoding for several sources at once.

        Each output stops after the end marker (which is kept) or after
        ``max_len`` tokens.
        """
        max_len = self.cfg.max_len if max_len is None else max_len
        src_ids, src_mask = pad_batch([s[: self.cfg.max_len] for s in src])
        with no_grad():
            memory = self.encode(self.source_embeddings(src_ids), src_mask)
            return self._greedy(memory, src_mask, self._attrs(l_t, len(src)), max_len)

    def generate(self, src: list[int], l_t, max_len: int | None = None) -> list[int]:
        return self.generate_batch([src], l_t, max_len)[0]

    def generate_from_embeddings(self, theta, l_t, max_len: int | None = None) -> list[int]:
        """Greedy decoding from (S, d) source embeddings instead of token ids."""
        theta = theta if isinstance(theta, Tensor) else Tensor(theta)
        if theta.ndim != 2 or theta.shape[1] != self.cfg.d or theta.shape[0] > self.cfg.max_len:
            raise ShapeError("generate-from-embeddings", theta.shape,
                             detail=f"expected (S <= {self.cfg.max_len}, {self.cfg.d})")
        max_len = self.cfg.max_len if max_len is None else max_len
        mask = np.ones((1, theta.shape[0]), dtype=bool)
        with no_grad():
            memory = self.encode(ops.reshape(Tensor(theta.data), (1,) + theta.shape), mask)
            return self._greedy(memory, mask, self._attrs(l_t, 1), max_len)[0]

    def forced_logits_from_embeddings(self, theta: Tensor, l_t, tokens: list[int]) -> Tensor:
        """Differentiable (T, V) logits for emitting ``tokens`` given source embeddings."""
        mask = np.ones((1, theta.shape[0]), dtype=bool)
        memory = self.encode(ops.reshape(theta, (1,) + theta.shape), mask)
        dec_in = np.asarray([[BOS] + list(tokens[: self.cfg.max_len - 1])], dtype=np.int64)
        logits = self.decode(memory, mask, dec_in, self._attrs(l_t, 1))
        return ops.reshape(logits, logits.shape[1:])
