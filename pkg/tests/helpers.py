"""Tiny models and batches shared by several test modules."""
import numpy as np

from paracontrol.models import (
    Generator,
    GeneratorConfig,
    Predictor,
    PredictorConfig,
    SemClassifier,
    SemConfig,
)

V = 13
N_ATTRS = 5


def tiny_generator(conditioned=True, seed=0):
    return Generator(GeneratorConfig(V, d=8, heads=2, encoder_layers=1, decoder_layers=1, max_len=10,
                                     seed=seed, conditioned=conditioned, n_attrs=N_ATTRS))


def tiny_predictor(seed=1):
    return Predictor(PredictorConfig(V, d=8, heads=2, layers=1, max_len=10, seed=seed, n_attrs=N_ATTRS))


def tiny_semantic(seed=2):
    return SemClassifier(SemConfig(V, d=8, heads=2, layers=1, max_len=10, temperature=0.5, seed=seed))


def batch(seed=0, b=3):
    rng = np.random.default_rng(seed)
    src = [list(rng.integers(3, V, size=rng.integers(2, 6))) for _ in range(b)]
    tgt = [list(rng.integers(3, V, size=rng.integers(2, 6))) for _ in range(b)]
    return src, tgt, rng.normal(size=(b, N_ATTRS))


def model_loss_checks():
    """(name, loss closure, parameters) for the three training objectives."""
    gen, lp, se = tiny_generator(), tiny_predictor(), tiny_semantic()
    src, tgt, l_t = batch()
    return [
        ("generator", lambda: gen.loss(src, tgt, l_t), gen.parameters()),
        ("predictor", lambda: lp.loss(tgt, l_t), lp.parameters()),
        ("semantic", lambda: se.loss(src, tgt), se.parameters()),
    ]
