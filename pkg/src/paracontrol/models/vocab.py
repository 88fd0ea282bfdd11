"""Word-level vocabulary shared by the generator, predictor and classifier."""
from __future__ import annotations

import json
import re
from collections import Counter
from typing import Iterable, Sequence

PAD, BOS, EOS, UNK = "<pad>", "<bos>", "<eos>", "<unk>"
SPECIALS = (PAD, BOS, EOS, UNK)

_TOKEN = re.compile(r"[^\W_]+(?:'[^\W_]+)*|[^\w\s]")
_NO_SPACE_BEFORE = re.compile(r" ([.,!?;:%)\]])")
_NO_SPACE_AFTER = re.compile(r"([$€£¥(\[]) ")


def split_tokens(text: str) -> list[str]:
    return _TOKEN.findall(text.replace("’", "'"))


def join_tokens(tokens: Sequence[str]) -> str:
    text = " ".join(tokens)
    text = _NO_SPACE_BEFORE.sub(r"\1", text)
    return _NO_SPACE_AFTER.sub(r"\1", text)


class Vocab:
    def __init__(self, tokens: Sequence[str]):
        if tuple(tokens[:4]) != SPECIALS:
            raise ValueError(f"vocabulary must start with {SPECIALS}")
        self.tokens = list(tokens)
        self.index = {t: i for i, t in enumerate(self.tokens)}
        if len(self.index) != len(self.tokens):
            raise ValueError("duplicate tokens in vocabulary")

    pad = property(lambda self: 0)
    bos = property(lambda self: 1)
    eos = property(lambda self: 2)
    unk = property(lambda self: 3)

    def __len__(self) -> int:
        return len(self.tokens)

    @classmethod
    def build(cls, texts: Iterable[str], min_count: int = 1) -> "Vocab":
        counts = Counter(tok for text in texts for tok in split_tokens(text))
        words = sorted((w for w, c in counts.items() if c >= min_count), key=lambda w: (-counts[w], w))
        return cls(list(SPECIALS) + words)

    def encode(self, text: str) -> list[int]:
        return [self.index.get(t, self.unk) for t in split_tokens(text)]

    def decode(self, ids: Iterable[int]) -> str:
        out = []
        for i in ids:
            i = int(i)
            if i == self.eos:
                break
            if i in (self.pad, self.bos):
                continue
            out.append(self.tokens[i])
        return join_tokens(out)

    def to_json(self) -> str:
        return json.dumps(self.index, indent=0)

    @classmethod
    def from_json(cls, text: str) -> "Vocab":
        index = json.loads(text)
        tokens = [None] * len(index)
        for tok, i in index.items():
            tokens[i] = tok
        return cls(tokens)
