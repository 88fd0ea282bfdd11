import json

import numpy as np
import pytest

from helpers import N_ATTRS, V, tiny_generator, tiny_predictor, tiny_semantic
from paracontrol.grad import Tensor, backward, ops
from paracontrol.models.generator import EOS
from paracontrol.quality_control import (
    ModelQCSystem,
    QCConfig,
    QuadraticSystem,
    adaptive_step_search,
    qc_generate,
)

START, OPT = np.array([3.0, -2.0, 0.5]), np.array([0.0, 1.0, 1.0])


class ScriptedGate:
    """Semantic scores handed out in order, one per call."""

    def __init__(self, scores):
        self.scores = list(scores)
        self.calls = 0

    def __call__(self, _out):
        self.calls += 1
        return self.scores.pop(0)


def test_quadratic_converges_with_decreasing_loss():
    res = qc_generate(QuadraticSystem(START, OPT), QCConfig(eta0=0.1, max_iters=50))
    path = res.loss_path()
    assert len(path) <= 50
    assert all(b < a for a, b in zip(path, path[1:]))
    assert np.linalg.norm(res.output - OPT) < 1e-3
    assert res.accepted_steps == 50 and res.stop_reason == "max_iters"
    assert all(t.accepted and t.tried[-1]["semantic"] >= 0.95 for t in res.trace)


def test_first_step_matches_hand_computation():
    # theta1 = theta0 - 0.1 * 2 (theta0 - opt) = 0.8 theta0 + 0.2 opt
    res = qc_generate(QuadraticSystem(START, OPT), QCConfig(eta0=0.1, max_iters=1))
    np.testing.assert_allclose(res.output, 0.8 * START + 0.2 * OPT)
    assert res.mse_before == pytest.approx(float(np.sum((START - OPT) ** 2)))
    assert res.mse_after == pytest.approx(0.64 * res.mse_before)


def test_step_search_grows_until_gate_passes():
    gate = ScriptedGate([0.1, 0.2, 0.99])
    system = QuadraticSystem(START, OPT, gate)
    grad = 2 * (START - OPT)
    tried = []
    cand = adaptive_step_search(START, grad, system.loss(START), QCConfig(eta0=0.01), system, tried)
    assert cand.eta == pytest.approx(0.01 * 2.25 ** 2)
    assert [t["accepted"] for t in tried] == [False, False, True]
    np.testing.assert_allclose(cand.theta, START - cand.eta * grad)


def test_step_search_gives_up_after_patience():
    system = QuadraticSystem(START, OPT, lambda _o: 0.5)
    tried = []
    grad = 2 * (START - OPT)
    assert adaptive_step_search(START, grad, system.loss(START), QCConfig(eta0=0.01, patience=3),
                                system, tried) is None
    assert [t["eta"] for t in tried] == pytest.approx([0.01, 0.0225, 0.050625])


def test_gate_is_only_consulted_when_loss_drops():
    gate = ScriptedGate([1.0] * 10)
    system = QuadraticSystem(START, OPT, gate)
    # a step of 1.0 along the gradient overshoots to the mirror point: loss unchanged, not lower
    adaptive_step_search(START, 2 * (START - OPT), system.loss(START), QCConfig(eta0=1.0, patience=2),
                         system)
    assert gate.calls == 0


def test_zero_gradient_keeps_the_input():
    res = qc_generate(QuadraticSystem(OPT, OPT), QCConfig(eta0=0.1))
    np.testing.assert_array_equal(res.output, OPT)
    assert res.accepted_steps == 0 and res.stop_reason == "no_improvement"
    assert res.semantic is None


def test_unreachable_gate_never_accepts():
    res = qc_generate(QuadraticSystem(START, OPT, lambda _o: 0.999), QCConfig(eta0=0.1, tau=1.0))
    np.testing.assert_array_equal(res.output, START)
    assert res.mse_after == res.mse_before


def test_iteration_cap():
    res = qc_generate(QuadraticSystem(START, OPT), QCConfig(eta0=1e-4, max_iters=7))
    assert len(res.trace) == 7 and res.stop_reason == "max_iters"
    assert QCConfig().max_iters == 100


def test_measure_guard_keeps_best_output():
    # a measure that prefers outputs far from the optimum picks the starting point
    res = qc_generate(QuadraticSystem(START, OPT), QCConfig(eta0=0.1, max_iters=5),
                      measure=lambda o: -float(np.sum((o - OPT) ** 2)))
    assert res.chosen_step == 0 and res.accepted_steps == 5
    np.testing.assert_array_equal(res.output, START)
    assert res.mse_after == res.mse_before


def test_trace_serializes():
    res = qc_generate(QuadraticSystem(START, OPT, ScriptedGate([0.0, 1.0] * 3)),
                      QCConfig(eta0=0.05, max_iters=3))
    data = json.loads(res.to_json())
    assert data["accepted_steps"] == 3 and len(data["trace"]) == 3
    assert [t["accepted"] for t in data["trace"][0]["tried"]] == [False, True]
    assert data["trace"][0]["eta"] == pytest.approx(0.05 * 2.25)


@pytest.mark.parametrize("kw", [{"eta0": 0}, {"gamma": 1.0}, {"tau": 0}, {"patience": 0}, {"max_iters": -1}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        QCConfig(**kw)


def model_system():
    l_t = np.random.default_rng(0).normal(size=N_ATTRS)
    return ModelQCSystem(tiny_generator(), tiny_predictor(), tiny_semantic(), [4, 7, 9, 5], l_t, max_len=6)


def test_model_gradient_follows_straight_through_chain_rule():
    system = model_system()
    theta = system.initial()
    out = system.generate(theta)
    body = system.body(out)
    loss, grad = system.loss_and_grad(theta, out)
    assert loss == pytest.approx(system.loss(out))
    # gradient with respect to the one-hot rows, pushed back through the logits
    rows = Tensor(np.eye(V)[body], requires_grad=True)
    diff = ops.sub(system.lp.forward_one_hot(rows), system.l_t)
    g_rows = backward(ops.sum_(ops.mul(diff, diff)), wrt=[rows])[rows]
    th = Tensor(theta, requires_grad=True)
    logits = system.g.forced_logits_from_embeddings(th, system.condition, body)
    expect = backward(ops.sum_(ops.mul(ops.slice_(logits, slice(0, len(body))), g_rows)), wrt=[th])[th]
    np.testing.assert_allclose(grad, expect, rtol=1e-10, atol=1e-12)


def test_model_system_runs_and_never_worsens_measured_loss():
    system = model_system()
    res = qc_generate(system, QCConfig(eta0=1e-2, tau=1e-6, max_iters=5), measure=system.loss)
    assert res.mse_after <= res.mse_before
    assert res.output[-1] == EOS or len(res.output) == 6
    assert res.predicted_attrs.shape == (N_ATTRS,)


def test_model_system_empty_output_is_infinitely_bad():
    system = model_system()
    assert system.loss([EOS]) == float("inf")
    loss, grad = system.loss_and_grad(system.initial(), [EOS])
    assert loss == float("inf") and not grad.any()
    with pytest.raises(ValueError):
        ModelQCSystem(tiny_generator(), tiny_predictor(), tiny_semantic(), [], np.zeros(N_ATTRS))
