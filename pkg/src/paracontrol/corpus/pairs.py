"""Paraphrase pairs: JSONL I/O, augmentation, splitting and biased target sampling."""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from paracontrol.attrs import K, extract, lookup

# precomputed attributes further than this from re-extraction trigger a warning
ATTR_TOLERANCE = 1e-6


class CorpusFormatError(ValueError):
    def __init__(self, path, line: int, detail: str):
        super().__init__(f"{path}:{line}: {detail}")
        self.path = str(path)
        self.line = line


class AttributeMismatchWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ParaphrasePair:
    source: str
    target: str
    l_s: np.ndarray = field(repr=False)
    l_t: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not self.source.strip() or not self.target.strip():
            raise ValueError("source and target must be non-empty")
        for name in ("l_s", "l_t"):
            v = getattr(self, name)
            if np.shape(v) != (K,):
                raise ValueError(f"{name} must have length {K}, got shape {np.shape(v)}")

    @classmethod
    def from_texts(cls, source: str, target: str) -> "ParaphrasePair":
        return cls(source, target, extract(source), extract(target))

    def reversed(self) -> "ParaphrasePair":
        return ParaphrasePair(self.target, self.source, self.l_t, self.l_s)

    def to_json(self) -> dict:
        return {"source": self.source, "target": self.target,
                "l_s": self.l_s.tolist(), "l_t": self.l_t.tolist()}

    @property
    def key(self) -> tuple[str, str]:
        return (self.source, self.target)


def _attrs_or_extract(obj: dict, name: str, text: str, path, lineno: int) -> np.ndarray:
    fresh = extract(text)
    if name not in obj:
        return fresh
    given = obj[name]
    if not isinstance(given, list) or len(given) != K:
        raise CorpusFormatError(path, lineno, f"'{name}' must be a list of {K} numbers")
    given = np.asarray(given, dtype=np.float64)
    gap = float(np.max(np.abs(given - fresh)))
    if gap > ATTR_TOLERANCE:
        warnings.warn(f"{path}:{lineno}: '{name}' differs from extracted attributes by {gap:.3g}",
                      AttributeMismatchWarning, stacklevel=3)
    return given


def load_pairs(path) -> list[ParaphrasePair]:
    """Read a JSONL file of ``{"source", "target"[, "l_s", "l_t"]}`` objects."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(path, lineno, f"invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise CorpusFormatError(path, lineno, "expected a JSON object")
            for key in ("source", "target"):
                if not isinstance(obj.get(key), str) or not obj[key].strip():
                    raise CorpusFormatError(path, lineno, f"missing or empty '{key}'")
            s, t = obj["source"], obj["target"]
            try:
                l_s = _attrs_or_extract(obj, "l_s", s, path, lineno)
                l_t = _attrs_or_extract(obj, "l_t", t, path, lineno)
            except ValueError as exc:
                if isinstance(exc, CorpusFormatError):
                    raise
                raise CorpusFormatError(path, lineno, str(exc)) from None
            pairs.append(ParaphrasePair(s, t, l_s, l_t))
    return pairs


def save_pairs(path, pairs: Iterable[ParaphrasePair]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in pairs:
            fh.write(json.dumps(p.to_json()) + "\n")


def augment(pairs: Sequence[ParaphrasePair], dedup: bool = False) -> list[ParaphrasePair]:
    """Add the reversed pair and both self pairs for every pair.

    Without ``dedup`` the result has exactly ``4 * len(pairs)`` entries.
    With it, repeated (source, target) combinations keep only their first
    occurrence.
    """
    if not pairs:
        raise ValueError("nothing to augment")
    out = []
    for p in pairs:
        out.append(p)
        out.append(p.reversed())
        out.append(ParaphrasePair(p.source, p.source, p.l_s, p.l_s))
        out.append(ParaphrasePair(p.target, p.target, p.l_t, p.l_t))
    if dedup:
        seen = set()
        kept = []
        for p in out:
            if p.key not in seen:
                seen.add(p.key)
                kept.append(p)
        out = kept
    return out


@dataclass(frozen=True)
class CorpusSplit:
    train: list[ParaphrasePair]
    validation: list[ParaphrasePair]
    test: list[ParaphrasePair]
    seed: int
    indices: dict[str, list[int]]

    def manifest(self) -> dict:
        return {"seed": self.seed, **{k: list(v) for k, v in self.indices.items()}}


def split(pairs: Sequence[ParaphrasePair], seed: int,
          ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)) -> CorpusSplit:
    """Seeded shuffle followed by a train/validation/test partition."""
    n = len(pairs)
    if n < 10:
        raise ValueError(f"need at least 10 pairs to split, got {n}")
    if len(ratios) != 3 or min(ratios) < 0 or abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must be three non-negative numbers summing to 1, got {ratios}")
    order = np.random.default_rng(seed).permutation(n)
    n_train = int(round(ratios[0] * n))
    n_val = int(round(ratios[1] * n))
    parts = {"train": order[:n_train], "validation": order[n_train:n_train + n_val],
             "test": order[n_train + n_val:]}
    idx = {k: sorted(int(i) for i in v) for k, v in parts.items()}
    return CorpusSplit(
        train=[pairs[i] for i in idx["train"]],
        validation=[pairs[i] for i in idx["validation"]],
        test=[pairs[i] for i in idx["test"]],
        seed=seed,
        indices=idx,
    )


def threshold_predicate(attr, threshold: float, above: bool = True) -> Callable[[np.ndarray], bool]:
    """Predicate testing one attribute against a threshold, e.g. TTR > 0.8."""
    a = lookup(attr).id
    if above:
        return lambda v: bool(v[a] > threshold)
    return lambda v: bool(v[a] <= threshold)


def biased_target_sample(pool, predicate: Callable[[np.ndarray], bool], p_hi: float, p_lo: float,
                         n: int, seed: int) -> np.ndarray:
    """Rejection-sample ``n`` vectors from ``pool``.

    A uniformly drawn candidate is kept with probability ``p_hi`` if it
    satisfies ``predicate`` and ``p_lo`` otherwise.
    """
    pool = np.asarray(pool, dtype=np.float64)
    if pool.ndim != 2 or len(pool) == 0:
        raise ValueError("pool must be a non-empty (n, k) matrix")
    if not 0.0 <= p_lo <= p_hi <= 1.0:
        raise ValueError(f"need 0 <= p_lo <= p_hi <= 1, got p_lo={p_lo}, p_hi={p_hi}")
    hits = np.array([predicate(v) for v in pool])
    accept = np.where(hits, p_hi, p_lo)
    if not np.any(accept > 0):
        raise ValueError("no pool vector can ever be accepted")
    rng = np.random.default_rng(seed)
    chosen = []
    while len(chosen) < n:
        need = n - len(chosen)
        draws = rng.integers(0, len(pool), size=max(2 * need, 16))
        keep = draws[rng.random(len(draws)) < accept[draws]]
        chosen.extend(keep[:need].tolist())
    return pool[np.asarray(chosen, dtype=np.int64)]
