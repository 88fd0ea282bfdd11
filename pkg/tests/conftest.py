"""Shared fixtures: one trained 2000-pair run built through the command line."""
import time

import pytest

from paracontrol.cli import main
from paracontrol.config import load_config
from paracontrol.evalharness import EvalReport
from paracontrol.pipeline import Run

CRITERIA = {
    1: "gradient checks below 1e-3 in under 30 s",
    2: "attributes match annotated goldens in under 1 s",
    3: "discretizer recovers 20 clusters and bin centers map back",
    4: "augmentation gives 4N pairs with swapped attributes",
    5: "straight-through pass: one-hot forward, surrogate backward",
    6: "quality control: quadratic convergence and no worse MSE on test items",
    7: "conditioning beats no conditioning, more so on novel targets",
    8: "copy and reference sanity values; group breakdown reconciles",
    9: "derangement has no fixed points; shuffled targets lie farther away",
    10: "biased sampler keeps 0.90 +/- 0.03",
    11: "suite under 5 min and demo pipeline under 15 min",
}
SUITE_LIMIT, DEMO_LIMIT = 300.0, 900.0

_results: dict[int, tuple[bool, str]] = {}
_clock = {"start": time.perf_counter(), "demo": None}
_reports: dict[str, EvalReport] = {}


@pytest.fixture
def record():
    def _record(criterion: int, ok: bool, detail: str) -> None:
        _results[criterion] = (bool(ok), detail)
    return _record


@pytest.fixture(scope="session")
def trained(tmp_path_factory):
    """Prepare, train all models and evaluate both modes with the default configuration."""
    out = tmp_path_factory.mktemp("run")
    common = ["--output-dir", str(out)]
    t0 = time.perf_counter()
    for cmd in (["prepare"], ["train-gen"], ["train-gen", "--unconditioned"], ["train-lp"], ["train-se"],
                ["evaluate", "--mode", "standard"], ["challenge"]):
        if main(cmd + common) != 0:
            raise RuntimeError(f"paracontrol {' '.join(cmd)} failed")
    _clock["demo"] = time.perf_counter() - t0
    run = Run(load_config(overrides={"output_dir": str(out)}))
    reports = {m: EvalReport.from_json(run.path(f"report_{m}.json").read_text()) for m in ("standard", "novel")}
    _reports.update(reports)
    return run, reports, _clock["demo"]


def suite_seconds() -> float:
    return time.perf_counter() - _clock["start"]


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    elapsed = suite_seconds()
    if 11 in _results and _clock["demo"] is not None:
        ok = elapsed < SUITE_LIMIT and _clock["demo"] < DEMO_LIMIT
        _results[11] = (ok, f"suite {elapsed:.0f}s, demo pipeline {_clock['demo']:.0f}s")
    for c, text in CRITERIA.items():
        if c not in _results:
            tr.write_line(f"[SKIP] {c:2d}. {text}: not run")
            continue
        ok, detail = _results[c]
        tr.write_line(f"[{'PASS' if ok else 'FAIL'}] {c:2d}. {text}: {detail}")
    for mode, report in _reports.items():
        tr.section(f"evaluation ({mode} targets)")
        tr.write_line(f"{'system':<16}{'semantic':>10}{'mse_lt':>10}{'mse_ls':>10}{'overall':>10}")
        for r in report.systems:
            tr.write_line(f"{r.system:<16}{r.semantic:>10.3f}{r.mse_lt:>10.3f}{r.mse_ls:>10.3f}{r.overall:>10.3f}")
        groups = report.system("conditioned").groups_lt
        tr.write_line("conditioned mse_lt by group: " + ", ".join(f"{g} {v:.3f}" for g, v in groups.items()))
