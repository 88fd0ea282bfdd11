"""Neural components: generator, attribute predictor and semantic classifier."""
from paracontrol.models.generator import Generator, GeneratorConfig, pad_batch
from paracontrol.models.predictor import Predictor, PredictorConfig, ste_pass
from paracontrol.models.semantic import SemClassifier, SemConfig, contrastive_loss, fit_logistic
from paracontrol.models.training import (
    TrainHistory,
    bucketed_batches,
    train_generator,
    train_predictor,
    train_semantic,
)
from paracontrol.models.vocab import Vocab, join_tokens, split_tokens

__all__ = [
    "Generator", "GeneratorConfig", "pad_batch", "Predictor", "PredictorConfig", "ste_pass",
    "SemClassifier", "SemConfig", "contrastive_loss", "fit_logistic", "TrainHistory",
    "bucketed_batches", "train_generator", "train_predictor", "train_semantic", "Vocab",
    "join_tokens", "split_tokens",
]
