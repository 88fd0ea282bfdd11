"""Training orchestration and on-disk artifacts.

Layout of a run directory::

    split.json                     split manifest
    train.jsonl validation.jsonl test.jsonl
    prep.json                      vocabulary, standardizer, discretizer
    generator.json                 attribute-conditioned generator
    generator_uncond.json          generator without attribute input
    predictor.json                 attribute predictor
    semantic.json                  semantic classifier with its calibration

Every JSON artifact carries the config hash and seed in its metadata.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from paracontrol.attrs import Discretizer, Standardizer, UnmeasurableText, extract, fit_discretizer, fit_standardizer
from paracontrol.config import config_hash
from paracontrol.corpus import ParaphrasePair, augment, load_pairs, save_pairs, split, synth_corpus
from paracontrol.grad import load_checkpoint, save_checkpoint
from paracontrol.models.generator import Generator, GeneratorConfig
from paracontrol.models.predictor import Predictor, PredictorConfig
from paracontrol.models.semantic import SemClassifier, SemConfig
from paracontrol.models.training import train_generator, train_predictor, train_semantic
from paracontrol.models.vocab import Vocab
from paracontrol.quality_control import GenerationResult, ModelQCSystem, QCConfig, qc_generate

log = logging.getLogger(__name__)

PRODUCERS = {
    "split.json": "prepare",
    "train.jsonl": "prepare",
    "validation.jsonl": "prepare",
    "test.jsonl": "prepare",
    "prep.json": "prepare",
    "generator.json": "train-gen",
    "generator_uncond.json": "train-gen --unconditioned",
    "predictor.json": "train-lp",
    "semantic.json": "train-se",
}


class MissingArtifactError(FileNotFoundError):
    def __init__(self, path: Path):
        self.path = Path(path)
        hint = PRODUCERS.get(self.path.name)
        msg = f"missing artifact: {self.path}"
        if hint:
            msg += f" (run `paracontrol {hint}` first)"
        super().__init__(msg)


@dataclass(frozen=True)
class AttrSpace:
    """Fitted attribute scaling shared by every model in a run."""

    standardizer: Standardizer
    discretizer: Discretizer

    def standardize(self, raw) -> np.ndarray:
        return self.standardizer.apply(raw)

    def condition(self, raw) -> np.ndarray:
        """Generator input: the standardized center of each attribute's bin."""
        return self.standardizer.apply(self.discretizer.quantize(raw))

    @classmethod
    def fit(cls, vectors, bins: int) -> "AttrSpace":
        return cls(fit_standardizer(vectors), fit_discretizer(vectors, bins))


def _meta(cfg: dict, kind: str, **extra) -> dict:
    return {"kind": kind, "config_hash": config_hash(cfg), "seed": cfg["seed"], **extra}


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=1, sort_keys=True))


class Run:
    """A run directory plus its config; loads artifacts lazily."""

    def __init__(self, cfg: dict, out_dir: str | Path | None = None):
        self.cfg = cfg
        self.dir = Path(out_dir if out_dir is not None else cfg["output_dir"])
        self._cache: dict = {}

    def path(self, name: str) -> Path:
        return self.dir / name

    def require(self, name: str) -> Path:
        p = self.path(name)
        if not p.exists():
            raise MissingArtifactError(p)
        return p

    # ------------------------------------------------------------ preparing
    def prepare(self, pairs: list[ParaphrasePair] | None = None) -> dict:
        cfg = self.cfg
        if pairs is None:
            pairs = self.load_corpus()
        parts = split(pairs, cfg["seed"], tuple(cfg["corpus"]["ratios"]))
        self.dir.mkdir(parents=True, exist_ok=True)
        for name, items in (("train", parts.train), ("validation", parts.validation), ("test", parts.test)):
            save_pairs(self.path(f"{name}.jsonl"), items)
        manifest = {**parts.manifest(), "meta": _meta(cfg, "split")}
        _write_json(self.path("split.json"), manifest)
        vectors = np.array([p.l_s for p in parts.train] + [p.l_t for p in parts.train])
        space = AttrSpace.fit(vectors, cfg["attrs"]["bins"])
        vocab = Vocab.build([p.source for p in parts.train] + [p.target for p in parts.train],
                            cfg["vocab"]["min_count"])
        prep = {
            "meta": _meta(cfg, "prep"),
            "vocab": json.loads(vocab.to_json()),
            "standardizer": space.standardizer.to_dict(),
            "discretizer": space.discretizer.to_dict(),
        }
        _write_json(self.path("prep.json"), prep)
        self._cache.clear()
        log.info("prepared %d/%d/%d pairs, vocabulary %d", len(parts.train), len(parts.validation),
                 len(parts.test), len(vocab))
        return manifest

    def load_corpus(self) -> list[ParaphrasePair]:
        c = self.cfg["corpus"]
        if c["path"]:
            return load_pairs(c["path"])
        return synth_corpus(c["synth_pairs"], self.cfg["seed"])

    # -------------------------------------------------------------- loading
    def pairs(self, name: str) -> list[ParaphrasePair]:
        key = ("pairs", name)
        if key not in self._cache:
            self._cache[key] = load_pairs(self.require(f"{name}.jsonl"))
        return self._cache[key]

    def _prep(self) -> dict:
        if "prep" not in self._cache:
            self._cache["prep"] = json.loads(self.require("prep.json").read_text())
        return self._cache["prep"]

    @property
    def vocab(self) -> Vocab:
        if "vocab" not in self._cache:
            self._cache["vocab"] = Vocab.from_json(json.dumps(self._prep()["vocab"]))
        return self._cache["vocab"]

    @property
    def space(self) -> AttrSpace:
        if "space" not in self._cache:
            prep = self._prep()
            self._cache["space"] = AttrSpace(Standardizer.from_dict(prep["standardizer"]),
                                             Discretizer.from_dict(prep["discretizer"]))
        return self._cache["space"]

    def _load_model(self, name: str, build):
        if name not in self._cache:
            params, meta = load_checkpoint(self.require(name))
            model = build(meta)
            model.load_state_dict(params)
            self._cache[name] = model
        return self._cache[name]

    def generator(self, conditioned: bool = True) -> Generator:
        name = "generator.json" if conditioned else "generator_uncond.json"
        return self._load_model(name, lambda meta: Generator(GeneratorConfig(**meta["model"])))

    def predictor(self) -> Predictor:
        return self._load_model("predictor.json", lambda meta: Predictor(PredictorConfig(**meta["model"])))

    def semantic(self) -> SemClassifier:
        def build(meta):
            model = SemClassifier(SemConfig(**meta["model"]))
            model.set_calibration(meta["calibration"])
            return model
        return self._load_model("semantic.json", build)

    # ------------------------------------------------------------- training
    def train_generator(self, conditioned: bool = True) -> dict:
        g = self.cfg["generator"]
        vocab, space = self.vocab, self.space
        data = augment(self.pairs("train"), dedup=True)
        model_cfg = GeneratorConfig(len(vocab), d=g["d"], heads=g["heads"], encoder_layers=g["encoder_layers"],
                                    decoder_layers=g["decoder_layers"], max_len=g["max_len"],
                                    seed=self.cfg["seed"], conditioned=conditioned)
        model = Generator(model_cfg)
        hist = train_generator(model, [vocab.encode(p.source) for p in data],
                               [vocab.encode(p.target) for p in data],
                               space.condition(np.array([p.l_t for p in data])),
                               epochs=g["epochs"], batch_size=g["batch_size"], lr=g["lr"], seed=self.cfg["seed"])
        name = "generator.json" if conditioned else "generator_uncond.json"
        meta = _meta(self.cfg, "generator", model=model_cfg.to_dict(), history=hist.to_dict())
        save_checkpoint(self.path(name), model.state_dict(), meta)
        self._cache[name] = model
        return meta

    def train_predictor(self) -> dict:
        p = self.cfg["predictor"]
        vocab, space = self.vocab, self.space
        texts: dict[str, np.ndarray] = {}
        for pair in self.pairs("train"):
            texts.setdefault(pair.source, pair.l_s)
            texts.setdefault(pair.target, pair.l_t)
        model_cfg = PredictorConfig(len(vocab), d=p["d"], heads=p["heads"], layers=p["layers"],
                                    max_len=p["max_len"], seed=self.cfg["seed"] + 1)
        model = Predictor(model_cfg)
        hist = train_predictor(model, [vocab.encode(t) for t in texts],
                               space.standardize(np.array(list(texts.values()))),
                               epochs=p["epochs"], batch_size=p["batch_size"], lr=p["lr"], seed=self.cfg["seed"])
        meta = _meta(self.cfg, "predictor", model=model_cfg.to_dict(), history=hist.to_dict())
        save_checkpoint(self.path("predictor.json"), model.state_dict(), meta)
        self._cache["predictor.json"] = model
        return meta

    def train_semantic(self) -> dict:
        s = self.cfg["semantic"]
        vocab = self.vocab
        train = self.pairs("train")
        both = list(train) + [p.reversed() for p in train]
        model_cfg = SemConfig(len(vocab), d=s["d"], heads=s["heads"], layers=s["layers"], max_len=s["max_len"],
                              temperature=s["temperature"], seed=self.cfg["seed"] + 2)
        model = SemClassifier(model_cfg)
        hist = train_semantic(model, [vocab.encode(p.source) for p in both], [vocab.encode(p.target) for p in both],
                              epochs=s["epochs"], batch_size=s["batch_size"], lr=s["lr"], seed=self.cfg["seed"])
        model.calibrate(*calibration_sets(self.pairs("validation"), vocab, self.cfg["seed"]))
        meta = _meta(self.cfg, "semantic", model=model_cfg.to_dict(), history=hist.to_dict(),
                     calibration=model.calibration())
        save_checkpoint(self.path("semantic.json"), model.state_dict(), meta)
        self._cache["semantic.json"] = model
        return meta

    # ----------------------------------------------------------- generating
    def generate(self, sources: list[str], l_t=None, conditioned: bool = True,
                 batch_size: int = 50) -> list[str]:
        """Greedy paraphrases; ``l_t`` holds raw target attributes (one row per source)."""
        model = self.generator(conditioned)
        vocab = self.vocab
        cond = None
        if conditioned:
            if l_t is None:
                raise ValueError("the conditioned generator needs target attributes")
            cond = self.space.condition(np.atleast_2d(np.asarray(l_t, dtype=np.float64)))
            if len(cond) != len(sources):
                raise ValueError(f"{len(sources)} sources but {len(cond)} attribute rows")
        ids = [vocab.encode(s) or [vocab.unk] for s in sources]
        order = np.argsort([len(i) for i in ids], kind="stable")
        out: list[str] = [""] * len(sources)
        for start in range(0, len(order), batch_size):
            idx = order[start:start + batch_size]
            gen = model.generate_batch([ids[i] for i in idx], None if cond is None else cond[idx])
            for i, tokens in zip(idx, gen):
                out[i] = vocab.decode(tokens)
        return out

    def attr_error(self, text: str, l_t, penalty: float) -> float:
        """Mean squared error between the standardized attributes of ``text`` and of ``l_t``."""
        a = measured_attrs(text)
        if a is None:
            return float(penalty)
        d = self.space.standardize(a) - self.space.standardize(l_t)
        return float(np.mean(d * d))

    def qc_generate(self, source: str, l_t, qc: QCConfig, penalty: float) -> tuple[str, GenerationResult]:
        """Conditioned generation refined by quality control; ``l_t`` is raw."""
        vocab, space = self.vocab, self.space
        system = ModelQCSystem(self.generator(True), self.predictor(), self.semantic(),
                               vocab.encode(source) or [vocab.unk], space.standardize(l_t), space.condition(l_t))
        result = qc_generate(system, qc, lambda out: self.attr_error(vocab.decode(out), l_t, penalty))
        return vocab.decode(result.output), result


def calibration_sets(pairs: list[ParaphrasePair], vocab: Vocab, seed: int):
    """Positive (source, target) pairs and negatives built from a cyclic shift of a shuffle."""
    if len(pairs) < 2:
        raise ValueError("calibration needs at least 2 pairs")
    src = [vocab.encode(p.source) for p in pairs]
    tgt = [vocab.encode(p.target) for p in pairs]
    order = np.random.default_rng(seed).permutation(len(pairs))
    shifted = np.roll(order, 1)
    return (src, tgt), ([src[i] for i in order], [tgt[j] for j in shifted])


def measured_attrs(text: str) -> np.ndarray | None:
    """Raw attributes of ``text``, or None when nothing in it can be measured."""
    try:
        return extract(text)
    except UnmeasurableText:
        return None
