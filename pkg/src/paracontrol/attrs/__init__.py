"""Linguistic attribute extraction, standardization and binning."""
from paracontrol.attrs.extract import UnmeasurableText, extract, extract_from_tokens
from paracontrol.attrs.registry import (
    GROUPS,
    K,
    KEYS,
    NAMES,
    REGISTRY,
    AttributeSpec,
    group_indices,
    group_of,
    lookup,
)
from paracontrol.attrs.scaling import (
    DEFAULT_BINS,
    Discretizer,
    Standardizer,
    fit_discretizer,
    fit_standardizer,
)
from paracontrol.attrs.text import Token, TokenizedText, tokenize

__all__ = [
    "GROUPS", "K", "KEYS", "NAMES", "REGISTRY", "AttributeSpec", "group_indices", "group_of",
    "lookup", "UnmeasurableText", "extract", "extract_from_tokens", "DEFAULT_BINS",
    "Discretizer", "Standardizer", "fit_discretizer", "fit_standardizer", "Token",
    "TokenizedText", "tokenize",
]
