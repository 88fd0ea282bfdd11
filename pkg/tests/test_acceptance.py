"""One test per acceptance criterion; the session summary prints a PASS/FAIL line for each."""
import time

import numpy as np

from conftest import DEMO_LIMIT, SUITE_LIMIT, suite_seconds
from helpers import model_loss_checks
from paracontrol.attrs import GROUPS, KEYS, extract, fit_discretizer, group_indices, lookup
from paracontrol.corpus import augment, biased_target_sample, synth_corpus, threshold_predicate
from paracontrol.evalharness import derangement, group_breakdown, mean_distance, novel_target_shuffle
from paracontrol.grad import Tensor, backward, grad_check, grad_check_params, ops
from paracontrol.models import ste_pass
from paracontrol.quality_control import QCConfig, QuadraticSystem, qc_generate
from test_attrs_golden import is_count, load_items, oracle
from test_grad import UNARY
from test_scaling import twenty_clusters


def test_criterion_01_gradients(record):
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    worst = {}
    for name, fn in UNARY.items():
        worst[name] = max(grad_check(fn, rng.normal(size=(3, 4))) for _ in range(10))
    for name, loss_fn, params in model_loss_checks():
        worst[name] = grad_check_params(loss_fn, params, per_param=10)
    secs = time.perf_counter() - t0
    name = max(worst, key=worst.get)
    ok = worst[name] < 1e-3 and secs < 30
    record(1, ok, f"worst {worst[name]:.1e} ({name}) over {len(worst)} functions, {secs:.1f}s")
    assert ok


def test_criterion_02_golden_attributes(record):
    items = load_items()
    extract(items[0]["text"])
    t0 = time.perf_counter()
    got = [extract(it["text"]) for it in items]
    secs = time.perf_counter() - t0
    bad = []
    for it, vec in zip(items, got):
        want = oracle(it)
        for key, value in zip(KEYS, vec):
            same = value == want[key] if is_count(key) else abs(value - want[key]) <= 1e-9
            if not same:
                bad.append(f"{it['text'][:20]}/{key}")
    ok = not bad and secs < 1.0
    record(2, ok, f"{len(items)} sentences x {len(KEYS)} attributes, {len(bad)} mismatches, {secs * 1e3:.0f}ms")
    assert ok, bad


def test_criterion_03_discretizer(record):
    x, means = twenty_clusters(0)
    disc = fit_discretizer(x, bins=20)
    err = max(float(np.max(np.abs(disc.centers[a] - means[:, a]))) for a in range(x.shape[1]))
    roundtrip = all(
        disc.discretize(np.array([disc.bin_center(a, b)] * x.shape[1]))[a] == b
        for a in range(x.shape[1]) for b in range(20))
    ok = disc.n_bins == (20,) * x.shape[1] and err < 0.5 and roundtrip
    record(3, ok, f"max center error {err:.3f} (noise sd 0.5, spacing 10), round trip {roundtrip}")
    assert ok


def test_criterion_04_augmentation(record):
    base = synth_corpus(50, seed=1)
    out = augment(base)
    swapped = all(np.array_equal(out[4 * i + 1].l_s, p.l_t) and np.array_equal(out[4 * i + 1].l_t, p.l_s)
                  and out[4 * i + 1].source == p.target for i, p in enumerate(base))
    ok = len(out) == 4 * len(base) and swapped
    record(4, ok, f"{len(base)} pairs -> {len(out)}, reversed attributes swapped: {swapped}")
    assert ok


def test_criterion_05_straight_through(record):
    rng = np.random.default_rng(1)
    fwd = bwd = 0
    for _ in range(100):
        t, v = rng.integers(1, 9), rng.integers(2, 12)
        logits = Tensor(rng.normal(size=(t, v)) * 2, requires_grad=True)
        up = rng.normal(size=(t, v))
        hard = ste_pass(logits)
        one_hot = np.eye(v)[logits.data.argmax(axis=-1)]
        fwd += np.array_equal(hard.data, one_hot)
        bwd += np.array_equal(backward(ops.sum_(ops.mul(hard, up)), wrt=[logits])[logits], up)
    ok = fwd == bwd == 100
    record(5, ok, f"exact one-hot {fwd}/100, gradient equals upstream {bwd}/100")
    assert ok


def test_criterion_06_quality_control(record, trained):
    start, opt = np.array([3.0, -2.0, 0.5]), np.array([0.0, 1.0, 1.0])
    seen = []
    res = qc_generate(QuadraticSystem(start, opt, lambda o: seen.append(1) or 0.97),
                      QCConfig(eta0=0.1, tau=0.95, max_iters=50))
    path = res.loss_path()
    decreasing = all(b < a for a, b in zip(path, path[1:]))
    dist = float(np.linalg.norm(res.output - opt))
    stub_ok = decreasing and dist < 1e-3 and len(path) <= 50 and len(seen) == res.accepted_steps

    _, reports, _ = trained
    items = []
    for mode in ("standard", "novel"):
        rep = reports[mode]
        qc, cond = rep.system("conditioned+qc"), rep.system("conditioned")
        before, after = np.array(qc.extra["qc_mse_before"]), np.array(qc.extra["qc_mse_after"])
        per_item = np.array(qc.per_item_lt) <= np.array(cond.per_item_lt) + 1e-12
        items.append((mode, float(np.mean(after <= before)), float(np.mean(per_item)),
                       float(np.mean(after < before))))
    real_ok = all(a == 1.0 and b == 1.0 for _, a, b, _ in items)
    detail = "; ".join(f"{m}: post<=pre {a:.0%}, <=conditioned {b:.0%}, strictly better {c:.0%}"
                       for m, a, b, c in items)
    ok = stub_ok and real_ok
    record(6, ok, f"quadratic dist {dist:.1e} in {len(path)} iters, gate calls {len(seen)}; {detail}")
    assert ok


def test_criterion_07_conditioning(record, trained):
    _, reports, _ = trained
    gaps = {}
    for mode, rep in reports.items():
        gaps[mode] = rep.system("uncontrolled").mse_lt - rep.system("conditioned").mse_lt
    ok = gaps["standard"] > 0 and gaps["novel"] > 0 and gaps["novel"] > gaps["standard"]
    detail = ", ".join(f"{m}: uncontrolled {reports[m].system('uncontrolled').mse_lt:.3f} vs conditioned "
                       f"{reports[m].system('conditioned').mse_lt:.3f}" for m in reports)
    record(7, ok, detail)
    assert ok


def test_criterion_08_sanity_values(record, trained):
    _, reports, _ = trained
    rep = reports["standard"]
    copy_ls, ref_lt = rep.system("copy").mse_ls, rep.system("reference").mse_lt
    worst = 0.0
    for r in reports.values():
        for s in r.systems:
            for groups in (s.groups_lt, s.groups_ls):
                weighted = sum(groups[g] * len(group_indices(g)) for g in GROUPS) / len(KEYS)
                worst = max(worst, abs(weighted - groups["macro"]))
            worst = max(worst, abs(s.groups_lt["macro"] - s.mse_lt))
    synthetic = group_breakdown(np.random.default_rng(0).uniform(size=len(KEYS)))
    ok = copy_ls == 0.0 and ref_lt == 0.0 and worst < 1e-9 and "macro" in synthetic
    record(8, ok, f"copy MSE(l^s) {copy_ls!r}, reference MSE(l^t) {ref_lt!r}, breakdown gap {worst:.1e}")
    assert ok


def test_criterion_09_derangement(record, trained):
    run, _, _ = trained
    fixed = sum(int(np.any(derangement(n, s) == np.arange(n))) for n in (2, 3, 10, 200) for s in range(250))
    pairs = run.pairs("test")
    space = run.space
    ls = space.standardize(np.array([p.l_s for p in pairs]))
    paired = mean_distance(ls, space.standardize(np.array([p.l_t for p in pairs])))
    shuffled = [mean_distance(ls, space.standardize(novel_target_shuffle(pairs, s).targets)) for s in range(5)]
    ok = fixed == 0 and min(shuffled) > paired
    record(9, ok, f"fixed points in 1000 derangements: {fixed}; distance paired {paired:.2f}, "
                  f"shuffled {min(shuffled):.2f}-{max(shuffled):.2f}")
    assert ok


def test_criterion_10_biased_sampler(record):
    pairs = synth_corpus(400, seed=2)
    pool = np.array([p.l_t for p in pairs])
    attr = lookup("ratio_unique_words").id
    threshold = float(np.median(pool[:, attr]))
    pred = threshold_predicate("ratio_unique_words", threshold)
    draws = biased_target_sample(pool, pred, p_hi=0.9, p_lo=0.1, n=10_000, seed=0)
    share_pool = float(np.mean([pred(v) for v in pool]))
    rate = float(np.mean([pred(v) for v in draws]))
    # the kept share depends on how much of the pool satisfies the predicate
    expected = 0.9 * share_pool / (0.9 * share_pool + 0.1 * (1 - share_pool))
    ok = abs(expected - 0.9) < 0.01 and abs(rate - 0.9) <= 0.03
    record(10, ok, f"rate {rate:.3f} over 10000 draws (pool share {share_pool:.2f}, expected {expected:.3f})")
    assert ok


def test_criterion_11_time_budget(record, trained):
    _, _, demo = trained
    elapsed = suite_seconds()
    ok = demo < DEMO_LIMIT and elapsed < SUITE_LIMIT
    record(11, ok, f"demo pipeline {demo:.0f}s, suite so far {elapsed:.0f}s")
    assert ok
