import json

import pytest

from paracontrol.cli import main
from paracontrol.config import (
    DEFAULTS,
    ConfigError,
    config_hash,
    get_dotted,
    load_config,
    merge,
    parse_value,
    set_dotted,
)

TINY = {
    "corpus": {"synth_pairs": 60},
    "generator": {"d": 8, "heads": 2, "encoder_layers": 1, "decoder_layers": 1, "max_len": 24, "epochs": 1},
    "predictor": {"d": 8, "heads": 2, "layers": 1, "max_len": 24, "epochs": 1},
    "semantic": {"d": 8, "heads": 2, "layers": 1, "max_len": 24, "epochs": 1},
    "qc": {"max_iters": 2},
}


def test_merge_rejects_unknown_keys():
    cfg = merge(DEFAULTS, {"generator": {"epochs": 9}})
    assert cfg["generator"]["epochs"] == 9 and cfg["generator"]["d"] == 64
    assert DEFAULTS["generator"]["epochs"] == 3
    with pytest.raises(ConfigError, match="generator.epochz"):
        merge(DEFAULTS, {"generator": {"epochz": 1}})
    with pytest.raises(ConfigError, match="object"):
        merge(DEFAULTS, {"qc": 3})


def test_dotted_keys():
    cfg = load_config(overrides={"qc.tau": 0.5, "seed": 4})
    assert get_dotted(cfg, "qc.tau") == 0.5 and cfg["seed"] == 4
    with pytest.raises(ConfigError, match="qc.nope"):
        set_dotted(cfg, "qc.nope", 1)
    with pytest.raises(ConfigError, match="section"):
        set_dotted(cfg, "qc", 1)
    with pytest.raises(ConfigError, match="unknown config key: seed"):
        set_dotted(cfg, "seed.x", 1)


def test_parse_value():
    assert parse_value("3") == 3 and parse_value("1e-3") == 0.001
    assert parse_value("null") is None and parse_value("[1, 2]") == [1, 2]
    assert parse_value("runs/x") == "runs/x"


def test_file_then_overrides(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"seed": 2, "qc": {"tau": 0.8}}))
    cfg = load_config(path, {"qc.tau": 0.9})
    assert cfg["seed"] == 2 and cfg["qc"]["tau"] == 0.9
    path.write_text("{oops")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_config(path)
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "none.json")


def test_config_hash_is_order_free_and_sensitive():
    a = load_config()
    b = json.loads(json.dumps(a))
    b = dict(reversed(list(b.items())))
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash(load_config(overrides={"seed": 1}))
    assert len(config_hash(a)) == 16


@pytest.fixture
def tiny_config(tmp_path):
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps({**TINY, "output_dir": str(tmp_path / "run")}))
    return str(path)


def test_missing_artifacts_exit_two_with_a_hint(tiny_config, capsys):
    assert main(["train-gen", "--config", tiny_config]) == 2
    err = capsys.readouterr().err
    assert "missing artifact" in err and "prep.json" in err and "paracontrol prepare" in err
    assert main(["prepare", "--config", tiny_config]) == 0
    assert main(["generate", "--config", tiny_config, "--text", "The cat sat."]) == 2
    err = capsys.readouterr().err
    assert "generator.json" in err and "train-gen" in err


def test_bad_config_exits_two(capsys):
    assert main(["extract", "--text", "Hi.", "--set", "qc.nope=1"]) == 2
    assert "unknown config key: qc.nope" in capsys.readouterr().err
    assert main(["extract", "--set", "novalue"]) == 2


def test_extract_embeds_hash_and_seed(capsys):
    assert main(["extract", "--text", "The cat sat.", "--seed", "7"]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["seed"] == 7 and row["attrs"]["total_words"] == 3.0
    assert row["config_hash"] == config_hash(load_config(overrides={"seed": 7}))


def test_end_to_end_commands(tiny_config, tmp_path, capsys):
    corpus = tmp_path / "c.jsonl"
    assert main(["synth", "--config", tiny_config, "--out", str(corpus)]) == 0
    meta = json.loads((tmp_path / "c.jsonl.meta.json").read_text())
    assert meta["pairs"] == 60 and meta["seed"] == 0
    assert main(["prepare", "--config", tiny_config, "--corpus", str(corpus)]) == 0
    for cmd in (["train-gen"], ["train-gen", "--unconditioned"], ["train-lp"], ["train-se"]):
        assert main(cmd + ["--config", tiny_config]) == 0
    ckpt = json.loads((tmp_path / "run" / "generator.json").read_text())
    assert ckpt["meta"]["config_hash"] == config_hash(load_config(tiny_config))
    capsys.readouterr()
    assert main(["generate", "--config", tiny_config, "--text", "The farmer bought a car.",
                 "--target-text", "The farmer purchased an old car yesterday."]) == 0
    trace = tmp_path / "trace.json"
    assert main(["qc-generate", "--config", tiny_config, "--text", "The farmer bought a car.",
                 "--trace", str(trace)]) == 0
    data = json.loads(trace.read_text())
    assert data["mse_after"] <= data["mse_before"] and "trace" in data and "config_hash" in data
    report, table = tmp_path / "r.json", tmp_path / "r.csv"
    assert main(["challenge", "--config", tiny_config, "--limit", "4", "--systems", "copy,reference",
                 "--report", str(report), "--csv", str(table)]) == 0
    out = capsys.readouterr().out
    assert "paired" in out and "shuffled" in out
    assert json.loads(report.read_text())["mode"] == "novel"
    assert table.read_text().startswith("system,")
    assert main(["evaluate", "--config", tiny_config, "--limit", "4", "--systems", "copy,bogus"]) == 2


def test_synth_command_is_byte_identical_for_a_seed(tmp_path, capsys):
    outs = []
    for name in ("a.jsonl", "b.jsonl"):
        assert main(["synth", "--n", "200", "--seed", "0", "--out", str(tmp_path / name)]) == 0
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]
