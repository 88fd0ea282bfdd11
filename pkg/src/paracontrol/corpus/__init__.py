"""Paraphrase pair corpora."""
from paracontrol.corpus.pairs import (
    AttributeMismatchWarning,
    CorpusFormatError,
    CorpusSplit,
    ParaphrasePair,
    augment,
    biased_target_sample,
    load_pairs,
    save_pairs,
    split,
    threshold_predicate,
)
from paracontrol.corpus.synth import synth_corpus

__all__ = [
    "AttributeMismatchWarning", "CorpusFormatError", "CorpusSplit", "ParaphrasePair", "augment",
    "biased_target_sample", "load_pairs", "save_pairs", "split", "threshold_predicate",
    "synth_corpus",
]
