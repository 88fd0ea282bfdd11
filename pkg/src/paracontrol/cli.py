"""Command-line entry point: ``paracontrol <command> [options]``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from paracontrol.attrs import KEYS, K, UnmeasurableText, extract
from paracontrol.config import ConfigError, config_hash, load_config, parse_value
from paracontrol.corpus import CorpusFormatError, save_pairs, synth_corpus
from paracontrol.pipeline import MissingArtifactError, Run

log = logging.getLogger("paracontrol")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config entry by dotted key, e.g. generator.epochs=5")
    p.add_argument("--seed", type=int, help="shortcut for --set seed=N")
    p.add_argument("--output-dir", help="run directory (shortcut for --set output_dir=PATH)")
    p.add_argument("-v", "--verbose", action="store_true")


def _target_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--text", required=True, help="source sentence")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--target-text", help="take target attributes from this sentence")
    g.add_argument("--target-attrs", help="JSON file with raw target attributes (list of 40 or key->value map)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paracontrol", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="linguistic attributes of sentences")
    _common(p)
    p.add_argument("--text", action="append", default=[], help="sentence (repeatable)")
    p.add_argument("--input", help="file with one sentence per line")
    p.add_argument("--out", help="write JSON lines here instead of stdout")

    p = sub.add_parser("synth", help="write a synthetic paraphrase corpus")
    _common(p)
    p.add_argument("--pairs", "--n", type=int, help="number of pairs (default: corpus.synth_pairs)")
    p.add_argument("--out", required=True, help="JSONL destination")

    p = sub.add_parser("prepare", help="split the corpus and fit vocabulary and attribute scaling")
    _common(p)
    p.add_argument("--corpus", help="JSONL corpus (default: synthetic)")

    p = sub.add_parser("train-gen", help="train the generator")
    _common(p)
    p.add_argument("--unconditioned", action="store_true", help="train the variant without attribute input")

    for name, text in (("train-lp", "train the attribute predictor"), ("train-se", "train the semantic classifier")):
        _common(sub.add_parser(name, help=text))

    p = sub.add_parser("generate", help="paraphrase one sentence")
    _common(p)
    _target_args(p)
    p.add_argument("--unconditioned", action="store_true")

    p = sub.add_parser("qc-generate", help="paraphrase one sentence with quality control")
    _common(p)
    _target_args(p)
    p.add_argument("--trace", help="write the refinement trace as JSON here")

    for name, text in (("evaluate", "evaluate systems on the test split"),
                       ("challenge", "evaluate with target attributes taken from other test items")):
        p = sub.add_parser(name, help=text)
        _common(p)
        if name == "evaluate":
            p.add_argument("--mode", choices=("standard", "novel"), default="standard")
        p.add_argument("--systems", help="comma-separated subset of copy,reference,uncontrolled,"
                                         "conditioned,conditioned+qc")
        p.add_argument("--limit", "--n", type=int, help="evaluate only the first N test items")
        p.add_argument("--report", help="JSON report path (default: <output_dir>/report_<mode>.json)")
        p.add_argument("--csv", help="also write a CSV table here")
    return parser


def _config(args) -> dict:
    overrides = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key.strip()] = parse_value(value)
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.output_dir is not None:
        overrides["output_dir"] = args.output_dir
    return load_config(args.config, overrides)


def _meta(cfg: dict) -> dict:
    return {"config_hash": config_hash(cfg), "seed": cfg["seed"]}


def _write(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _target(args) -> np.ndarray:
    if args.target_text:
        return extract(args.target_text)
    if args.target_attrs:
        path = Path(args.target_attrs)
        if not path.exists():
            raise MissingArtifactError(path)
        data = json.loads(path.read_text())
        if isinstance(data, dict):
            missing = [k for k in KEYS if k not in data]
            if missing:
                raise ValueError(f"{path}: missing attributes {missing}")
            data = [data[k] for k in KEYS]
        vec = np.asarray(data, dtype=np.float64)
        if vec.shape != (K,):
            raise ValueError(f"{path}: expected {K} attributes, got shape {vec.shape}")
        return vec
    # no target given: keep the source's own attributes
    return extract(args.text)


def cmd_extract(args, cfg) -> int:
    texts = list(args.text)
    if args.input:
        path = Path(args.input)
        if not path.exists():
            raise MissingArtifactError(path)
        texts += [line.strip() for line in path.read_text().splitlines() if line.strip()]
    if not texts:
        raise ValueError("give --text or --input")
    lines = []
    for t in texts:
        try:
            row = {"text": t, "attrs": dict(zip(KEYS, extract(t).tolist()))}
        except UnmeasurableText:
            row = {"text": t, "attrs": None}
        lines.append(json.dumps({**row, **_meta(cfg)}))
    out = "\n".join(lines) + "\n"
    if args.out:
        _write(args.out, out)
    else:
        sys.stdout.write(out)
    return 0


def cmd_synth(args, cfg) -> int:
    n = args.pairs or cfg["corpus"]["synth_pairs"]
    pairs = synth_corpus(n, cfg["seed"])
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    save_pairs(args.out, pairs)
    _write(f"{args.out}.meta.json", json.dumps({**_meta(cfg), "pairs": n}, indent=1))
    print(f"wrote {n} pairs to {args.out}")
    return 0


def cmd_prepare(args, cfg) -> int:
    if args.corpus:
        if not Path(args.corpus).exists():
            raise MissingArtifactError(Path(args.corpus))
        cfg["corpus"]["path"] = args.corpus
    run = Run(cfg)
    manifest = run.prepare()
    print(f"prepared {run.dir}: " + ", ".join(f"{k}={len(manifest[k])}" for k in ("train", "validation", "test")))
    return 0


def cmd_train(args, cfg) -> int:
    run = Run(cfg)
    if args.command == "train-gen":
        meta = run.train_generator(conditioned=not args.unconditioned)
    elif args.command == "train-lp":
        meta = run.train_predictor()
    else:
        meta = run.train_semantic()
    h = meta["history"]
    print(f"{meta['kind']}: final loss {h['epoch_loss'][-1]:.4f} after {len(h['epoch_loss'])} epochs "
          f"({h['seconds']:.1f}s)")
    return 0


def cmd_generate(args, cfg) -> int:
    run = Run(cfg)
    target = _target(args)
    if args.command == "generate":
        text = run.generate([args.text], target[None], conditioned=not args.unconditioned)[0]
        print(text)
        return 0
    from paracontrol.quality_control import QCConfig
    text, result = run.qc_generate(args.text, target, QCConfig(**cfg["qc"]), cfg["eval"]["penalty"])
    print(text)
    print(f"attribute MSE {result.mse_before:.4f} -> {result.mse_after:.4f}, "
          f"{result.accepted_steps} accepted steps ({result.stop_reason})", file=sys.stderr)
    if args.trace:
        _write(args.trace, json.dumps({**result.to_dict(), "text": text, **_meta(cfg)}, indent=1))
    return 0


def cmd_evaluate(args, cfg) -> int:
    from paracontrol.evalharness import SYSTEMS, mean_distance, novel_target_shuffle, run_eval

    run = Run(cfg)
    mode = "novel" if args.command == "challenge" else args.mode
    systems = tuple(s.strip() for s in args.systems.split(",")) if args.systems else SYSTEMS
    report = run_eval(run, systems, mode=mode, limit=args.limit)
    path = Path(args.report) if args.report else run.path(f"report_{mode}.json")
    _write(path, report.to_json())
    if args.csv:
        _write(args.csv, report.to_csv())
    sys.stdout.write(report.to_csv())
    if mode == "novel":
        pairs = run.pairs("test")[: args.limit] if args.limit else run.pairs("test")
        space = run.space
        ls = space.standardize(np.array([p.l_s for p in pairs]))
        paired = mean_distance(ls, space.standardize(np.array([p.l_t for p in pairs])))
        shuffled = mean_distance(ls, space.standardize(novel_target_shuffle(pairs, cfg["seed"]).targets))
        print(f"mean source-target attribute distance: paired {paired:.3f}, shuffled {shuffled:.3f}")
    if any(report.degenerate.values()):
        print("note: min-max normalization was degenerate; affected terms set to 0.5", file=sys.stderr)
    print(f"report written to {path}", file=sys.stderr)
    return 0


COMMANDS = {
    "extract": cmd_extract,
    "synth": cmd_synth,
    "prepare": cmd_prepare,
    "train-gen": cmd_train,
    "train-lp": cmd_train,
    "train-se": cmd_train,
    "generate": cmd_generate,
    "qc-generate": cmd_generate,
    "evaluate": cmd_evaluate,
    "challenge": cmd_evaluate,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except MissingArtifactError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ConfigError, CorpusFormatError, UnmeasurableText, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
