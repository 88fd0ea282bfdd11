"""Metrics and evaluation protocols."""
from __future__ import annotations

import csv
import io
import json
import logging
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from paracontrol.attrs import GROUPS, K, group_indices
from paracontrol.corpus import ParaphrasePair
from paracontrol.models.vocab import split_tokens
from paracontrol.quality_control import QCConfig

log = logging.getLogger(__name__)

SYSTEMS = ("copy", "reference", "uncontrolled", "conditioned", "conditioned+qc")
MODES = ("standard", "novel")
CSV_COLUMNS = ("system", "semantic", "mse_lt", "mse_ls", "overall")

Scorer = Callable[[Sequence[str], Sequence[str]], np.ndarray]


# ------------------------------------------------------------------ errors
def squared_errors(generated: Sequence[np.ndarray | None], reference: np.ndarray,
                   penalty: float) -> tuple[np.ndarray, np.ndarray]:
    """(n, k) squared errors between standardized vectors, plus an unmeasurable flag per row.

    A ``None`` row stands for a generation with no measurable words; every
    cell of that row gets ``penalty`` so its per-sample MSE equals it.
    """
    reference = np.atleast_2d(np.asarray(reference, dtype=np.float64))
    if len(generated) != len(reference):
        raise ValueError(f"{len(generated)} generations but {len(reference)} references")
    errors = np.empty(reference.shape)
    flags = np.zeros(len(reference), dtype=bool)
    for i, g in enumerate(generated):
        if g is None:
            errors[i] = penalty
            flags[i] = True
        else:
            d = np.asarray(g, dtype=np.float64) - reference[i]
            errors[i] = d * d
    return errors, flags


def aggregate(errors: np.ndarray, average: str = "macro") -> float:
    """Set-level MSE from (n, k) squared errors.

    ``macro`` averages each attribute over items and then the attributes;
    ``micro`` pools every cell. On complete matrices the two agree; they
    part ways only when cells are missing (NaN), which ``micro`` skips cell
    by cell and ``macro`` skips within each attribute.
    """
    errors = np.asarray(errors, dtype=np.float64)
    if errors.ndim != 2 or errors.size == 0:
        raise ValueError(f"expected a non-empty (n, k) matrix, got shape {errors.shape}")
    if average == "macro":
        return float(np.mean(np.nanmean(errors, axis=0)))
    if average == "micro":
        return float(np.nanmean(errors))
    raise ValueError(f"average must be 'macro' or 'micro', got {average!r}")


def mse_attrs(generated: np.ndarray | None, reference: np.ndarray, penalty: float = 10.0) -> tuple[float, bool]:
    """MSE of one generation's standardized attributes; (value, unmeasurable)."""
    errors, flags = squared_errors([generated], reference, penalty)
    return float(errors.mean()), bool(flags[0])


def group_breakdown(per_attr: np.ndarray) -> dict[str, float]:
    """Per-group mean of per-attribute MSEs, plus the attribute-level mean as ``macro``."""
    per_attr = np.asarray(per_attr, dtype=np.float64)
    if per_attr.shape != (K,):
        raise ValueError(f"expected {K} per-attribute values, got shape {per_attr.shape}")
    out = {g: float(per_attr[group_indices(g)].mean()) for g in GROUPS}
    out["macro"] = float(per_attr.mean())
    return out


# ----------------------------------------------------------------- overall
@dataclass(frozen=True)
class OverallResult:
    scores: dict[str, float]
    degenerate_ls: bool
    degenerate_lt: bool


def _minmax(values: dict[str, float]) -> tuple[dict[str, float], bool]:
    lo, hi = min(values.values()), max(values.values())
    if hi == lo:
        return {k: 0.5 for k in values}, True
    return {k: (v - lo) / (hi - lo) for k, v in values.items()}, False


def overall_score(semantic: dict[str, float], mse_lt: dict[str, float], mse_ls: dict[str, float]) -> OverallResult:
    """Mean of the semantic score, normalized MSE(l^s) and 1 - normalized MSE(l^t).

    Normalization is min-max over the systems passed in. When every system
    shares the same value the normalized term is 0.5 and the result flags it.
    """
    if not semantic or set(semantic) != set(mse_lt) or set(semantic) != set(mse_ls):
        raise ValueError("semantic, mse_lt and mse_ls must cover the same non-empty set of systems")
    ls, deg_ls = _minmax(mse_ls)
    lt, deg_lt = _minmax(mse_lt)
    scores = {k: (semantic[k] + ls[k] + (1.0 - lt[k])) / 3.0 for k in semantic}
    return OverallResult(scores, deg_ls, deg_lt)


# -------------------------------------------------------------- challenge
def derangement(n: int, seed: int) -> np.ndarray:
    """Uniform random permutation with no fixed point (rejection sampling)."""
    if n < 2:
        raise ValueError("a derangement needs at least 2 items")
    rng = np.random.default_rng(seed)
    while True:
        perm = rng.permutation(n)
        if not np.any(perm == np.arange(n)):
            return perm


@dataclass(frozen=True)
class Challenge:
    pairs: tuple[ParaphrasePair, ...]
    targets: np.ndarray
    assignment: np.ndarray
    seed: int


def novel_target_shuffle(pairs: Sequence[ParaphrasePair], seed: int) -> Challenge:
    """Give each source the target attributes of a different item."""
    perm = derangement(len(pairs), seed)
    targets = np.array([pairs[j].l_t for j in perm])
    return Challenge(tuple(pairs), targets, perm, seed)


def mean_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Mean Euclidean distance between aligned rows."""
    return float(np.mean(np.linalg.norm(np.asarray(a) - np.asarray(b), axis=1)))


# ----------------------------------------------------------------- scorers
def unigram_f1(sources: Sequence[str], outputs: Sequence[str]) -> np.ndarray:
    """Clipped unigram overlap F1 on lowercased tokens; 0 when either side is empty."""
    out = np.zeros(len(sources))
    for i, (s, o) in enumerate(zip(sources, outputs)):
        a = Counter(t.lower() for t in split_tokens(s))
        b = Counter(t.lower() for t in split_tokens(o))
        overlap = sum((a & b).values())
        if overlap:
            p, r = overlap / sum(b.values()), overlap / sum(a.values())
            out[i] = 2 * p * r / (p + r)
    return out


def semantic_scorer(model, vocab) -> Scorer:
    """Calibrated classifier probability; empty outputs score 0."""
    def score(sources, outputs):
        out = np.zeros(len(sources))
        keep = [i for i, o in enumerate(outputs) if vocab.encode(o)]
        if keep:
            src = [vocab.encode(sources[i]) or [vocab.unk] for i in keep]
            out[keep] = model.score_batch(src, [vocab.encode(outputs[i]) for i in keep])
        return out
    return score


# ------------------------------------------------------------------ report
@dataclass
class SystemResult:
    system: str
    n: int
    semantic: float
    mse_lt: float
    mse_ls: float
    overall: float
    groups_lt: dict[str, float]
    groups_ls: dict[str, float]
    unmeasurable: int
    per_item_lt: list[float] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)


@dataclass
class EvalReport:
    mode: str
    seed: int
    config_hash: str
    average: str
    scorer: str
    degenerate: dict[str, bool]
    systems: list[SystemResult]
    seconds: float = 0.0

    def system(self, name: str) -> SystemResult:
        for s in self.systems:
            if s.system == name:
                return s
        raise KeyError(name)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        d = json.loads(text)
        d["systems"] = [SystemResult(**s) for s in d["systems"]]
        return cls(**d)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for s in self.systems:
            w.writerow([s.system] + [repr(getattr(s, c)) for c in CSV_COLUMNS[1:]])
        return buf.getvalue()


# -------------------------------------------------------------------- runs
def _system_outputs(run, name: str, pairs, targets, qc: QCConfig, penalty: float) -> tuple[list[str], dict]:
    sources = [p.source for p in pairs]
    if name == "copy":
        return sources, {}
    if name == "reference":
        return [p.target for p in pairs], {}
    if name == "uncontrolled":
        return run.generate(sources, conditioned=False), {}
    if name == "conditioned":
        return run.generate(sources, targets, conditioned=True), {}
    if name == "conditioned+qc":
        texts, accepted, before, after = [], [], [], []
        for s, lt in zip(sources, targets):
            text, res = run.qc_generate(s, lt, qc, penalty)
            texts.append(text)
            accepted.append(res.accepted_steps)
            before.append(res.mse_before)
            after.append(res.mse_after)
        return texts, {"accepted_steps": accepted, "qc_mse_before": before, "qc_mse_after": after}
    raise ValueError(f"unknown system {name!r}; choose from {SYSTEMS}")


def run_eval(run, systems: Sequence[str] = SYSTEMS, mode: str = "standard", seed: int | None = None,
             scorer: Scorer | None = None, scorer_name: str | None = None, qc: QCConfig | None = None,
             limit: int | None = None, keep_outputs: bool = True) -> EvalReport:
    """Evaluate ``systems`` on the test split of ``run``.

    In ``novel`` mode each item's target attributes come from another item
    (see :func:`novel_target_shuffle`), seeded by ``seed``.
    """
    from paracontrol.config import config_hash
    from paracontrol.pipeline import measured_attrs

    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    unknown = [s for s in systems if s not in SYSTEMS]
    if unknown or not systems:
        raise ValueError(f"unknown systems {unknown}; choose from {SYSTEMS}")
    cfg = run.cfg
    seed = cfg["seed"] if seed is None else seed
    ev = cfg["eval"]
    penalty, average = float(ev["penalty"]), ev["average"]
    qc = qc or QCConfig(**cfg["qc"])
    pairs = run.pairs("test")
    limit = ev["limit"] if limit is None else limit
    if limit:
        pairs = pairs[:limit]
    if mode == "novel":
        targets = novel_target_shuffle(pairs, seed).targets
    else:
        targets = np.array([p.l_t for p in pairs])
    if scorer is None:
        if ev["scorer"] == "unigram_f1":
            scorer, scorer_name = unigram_f1, "unigram_f1"
        else:
            scorer, scorer_name = semantic_scorer(run.semantic(), run.vocab), "semantic"
    space = run.space
    ref_lt = space.standardize(targets)
    ref_ls = space.standardize(np.array([p.l_s for p in pairs]))
    sources = [p.source for p in pairs]

    t0 = time.perf_counter()
    rows = {}
    for name in systems:
        t = time.perf_counter()
        texts, extra = _system_outputs(run, name, pairs, targets, qc, penalty)
        measured = [measured_attrs(x) for x in texts]
        std = [None if m is None else space.standardize(m) for m in measured]
        err_lt, flags = squared_errors(std, ref_lt, penalty)
        err_ls, _ = squared_errors(std, ref_ls, penalty)
        rows[name] = (texts, extra, err_lt, err_ls, flags, float(np.mean(scorer(sources, texts))))
        log.info("%s/%s done in %.1fs", mode, name, time.perf_counter() - t)

    overall = overall_score({k: v[5] for k, v in rows.items()},
                            {k: aggregate(v[2], average) for k, v in rows.items()},
                            {k: aggregate(v[3], average) for k, v in rows.items()})
    results = []
    for name, (texts, extra, err_lt, err_ls, flags, sem) in rows.items():
        results.append(SystemResult(
            system=name,
            n=len(texts),
            semantic=sem,
            mse_lt=aggregate(err_lt, average),
            mse_ls=aggregate(err_ls, average),
            overall=overall.scores[name],
            groups_lt=group_breakdown(err_lt.mean(axis=0)),
            groups_ls=group_breakdown(err_ls.mean(axis=0)),
            unmeasurable=int(flags.sum()),
            per_item_lt=err_lt.mean(axis=1).tolist(),
            outputs=texts if keep_outputs else [],
            extra=extra,
        ))
    return EvalReport(mode=mode, seed=seed, config_hash=config_hash(cfg), average=average,
                      scorer=scorer_name or getattr(scorer, "__name__", "custom"),
                      degenerate={"mse_ls": overall.degenerate_ls, "mse_lt": overall.degenerate_lt},
                      systems=results, seconds=time.perf_counter() - t0)
