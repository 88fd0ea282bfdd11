import numpy as np
import pytest

from paracontrol.attrs import GROUPS, K, group_indices
from paracontrol.corpus import synth_corpus
from paracontrol.evalharness import (
    CSV_COLUMNS,
    EvalReport,
    SystemResult,
    aggregate,
    derangement,
    group_breakdown,
    mean_distance,
    mse_attrs,
    novel_target_shuffle,
    overall_score,
    squared_errors,
    unigram_f1,
)


def test_squared_errors_and_penalty_rows():
    ref = np.array([[0.0, 1.0], [2.0, 2.0]])
    err, flags = squared_errors([np.array([1.0, 1.0]), None], ref, penalty=7.0)
    np.testing.assert_array_equal(err, [[1.0, 0.0], [7.0, 7.0]])
    np.testing.assert_array_equal(flags, [False, True])
    assert mse_attrs(np.array([1.0, 3.0]), np.array([0.0, 0.0])) == (5.0, False)
    assert mse_attrs(None, np.zeros(2), penalty=3.0) == (3.0, True)
    with pytest.raises(ValueError):
        squared_errors([None], ref, 1.0)


def test_macro_and_micro_averages():
    err = np.array([[1.0, 4.0], [3.0, np.nan], [2.0, 6.0]])
    # macro: attribute means 2 and 5 -> 3.5; micro: 16 over 5 cells
    assert aggregate(err, "macro") == pytest.approx(3.5)
    assert aggregate(err, "micro") == pytest.approx(16 / 5)
    full = np.arange(12.0).reshape(4, 3)
    assert aggregate(full, "macro") == pytest.approx(aggregate(full, "micro"))
    with pytest.raises(ValueError):
        aggregate(full, "weighted")


def test_group_breakdown_reconciles():
    per_attr = np.random.default_rng(0).uniform(size=K)
    g = group_breakdown(per_attr)
    assert set(g) == set(GROUPS) | {"macro"}
    weighted = sum(g[name] * len(group_indices(name)) for name in GROUPS) / K
    assert abs(weighted - g["macro"]) < 1e-9
    assert g["macro"] == pytest.approx(per_attr.mean())
    with pytest.raises(ValueError):
        group_breakdown(per_attr[:5])


def test_overall_by_hand():
    sem = {"a": 0.9, "b": 0.6, "c": 0.3}
    lt = {"a": 1.0, "b": 3.0, "c": 2.0}
    ls = {"a": 0.0, "b": 4.0, "c": 1.0}
    res = overall_score(sem, lt, ls)
    # normalized ls: a 0, b 1, c 0.25; normalized lt: a 0, b 1, c 0.5
    assert res.scores["a"] == pytest.approx((0.9 + 0.0 + 1.0) / 3)
    assert res.scores["b"] == pytest.approx((0.6 + 1.0 + 0.0) / 3)
    assert res.scores["c"] == pytest.approx((0.3 + 0.25 + 0.5) / 3)
    assert not res.degenerate_ls and not res.degenerate_lt


def test_overall_degenerate_terms_are_half_and_flagged():
    res = overall_score({"a": 1.0, "b": 0.0}, {"a": 2.0, "b": 2.0}, {"a": 0.0, "b": 1.0})
    assert res.degenerate_lt and not res.degenerate_ls
    assert res.scores["a"] == pytest.approx((1.0 + 0.0 + 0.5) / 3)
    single = overall_score({"x": 0.4}, {"x": 1.0}, {"x": 1.0})
    assert single.degenerate_lt and single.degenerate_ls
    assert single.scores["x"] == pytest.approx((0.4 + 0.5 + 0.5) / 3)
    with pytest.raises(ValueError):
        overall_score({"a": 1.0}, {"b": 1.0}, {"a": 1.0})


def test_derangement_has_no_fixed_points():
    for n in (2, 3, 7, 50):
        for seed in range(200):
            perm = derangement(n, seed)
            assert sorted(perm) == list(range(n))
            assert np.all(perm != np.arange(n))
    np.testing.assert_array_equal(derangement(9, 4), derangement(9, 4))
    with pytest.raises(ValueError):
        derangement(1, 0)


def test_novel_targets_are_farther_than_paired_ones():
    pairs = synth_corpus(200, seed=5)
    ls = np.array([p.l_s for p in pairs])
    lt = np.array([p.l_t for p in pairs])
    ch = novel_target_shuffle(pairs, seed=0)
    np.testing.assert_array_equal(ch.targets, lt[ch.assignment])
    scale = lt.std(axis=0) + 1e-9
    assert mean_distance(ls / scale, ch.targets / scale) > mean_distance(ls / scale, lt / scale)


def test_unigram_f1():
    # overlap {the, cat, .} = 3; precision 3/4, recall 3/5
    got = unigram_f1(["The cat sat down.", "x"], ["the cat ran.", ""])
    assert got[0] == pytest.approx(2 * 0.75 * 0.6 / 1.35)
    assert got[1] == 0.0
    assert unigram_f1(["a a b"], ["a b b"])[0] == pytest.approx(2 / 3)


def make_report():
    sys = [SystemResult("copy", 2, 1.0, 0.5, 0.0, 0.6, {"macro": 0.5}, {"macro": 0.0}, 0, [0.4, 0.6],
                        ["a", "b"]),
           SystemResult("reference", 2, 0.8, 0.0, 0.5, 0.7, {"macro": 0.0}, {"macro": 0.5}, 1,
                        extra={"note": 1})]
    return EvalReport("standard", 3, "abc", "macro", "unigram_f1", {"mse_ls": False, "mse_lt": False}, sys)


def test_report_json_round_trip():
    rep = make_report()
    back = EvalReport.from_json(rep.to_json())
    assert back == rep
    assert back.system("reference").unmeasurable == 1
    with pytest.raises(KeyError):
        back.system("nope")


def test_report_csv():
    lines = make_report().to_csv().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1].split(",") == ["copy", "1.0", "0.5", "0.0", "0.6"]
    assert len(lines) == 3
