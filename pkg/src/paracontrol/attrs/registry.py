"""The fixed, ordered list of 40 linguistic attributes."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass

GROUPS = ("lexical", "syntactic", "discourse")


@dataclass(frozen=True)
class AttributeSpec:
    id: int
    key: str
    name: str
    group: str
    unit: str
    added: bool = False  # not among the 36 published indices


_TABLE = [
    ("unique_sophisticated_words", "# Unique sophisticated words", "lexical", "count"),
    ("unique_lexical_words", "# Unique lexical words", "lexical", "count"),
    ("unique_sophisticated_lexical_words", "# Unique sophisticated lexical words", "lexical", "count"),
    ("total_words", "# Total words", "lexical", "count"),
    ("total_sophisticated_words", "# Total sophisticated words", "lexical", "count"),
    ("lexical_sophistication_unique", "Lexical sophistication (unique)", "lexical", "ratio"),
    ("verb_sophistication", "Verb sophistication", "lexical", "ratio"),
    ("ratio_unique_words", "Ratio of unique words", "lexical", "ratio"),
    ("ratio_unique_verbs", "Ratio of unique verbs", "lexical", "ratio"),
    ("ratio_unique_adjectives", "Ratio of unique adjectives", "lexical", "ratio"),
    ("ratio_unique_adverbs", "Ratio of unique adverbs", "lexical", "ratio"),
    ("dependent_clauses", "# Dependent clauses", "syntactic", "count"),
    ("clauses", "# Clauses", "syntactic", "count"),
    ("t_units", "# T-units", "syntactic", "count"),
    ("complex_t_units", "# Complex T-units", "syntactic", "count"),
    ("complex_nominals", "# Complex nominals", "syntactic", "count"),
    ("stop_words", "# Stop Words", "lexical", "count"),
    ("sentences", "# Sentences", "syntactic", "count"),
    ("characters", "# Characters", "lexical", "count"),
    ("words_per_sentence", "Average Words Per Sentence", "syntactic", "mean"),
    ("characters_per_sentence", "Average Characters Per Sentence", "syntactic", "mean"),
    ("characters_per_word", "Average Characters Per Word", "lexical", "mean"),
    ("syllables_per_sentence", "Average Syllables Per Sentence", "syntactic", "mean"),
    ("total_age_of_acquisition", "Total Age Of Acquistion Of Words", "lexical", "years"),
    ("entities_norp", "# Named Entities Norp", "discourse", "count"),
    ("entities_gpe", "# Named Entities Gpe", "discourse", "count"),
    ("entities_law", "# Named Entities Law", "discourse", "count"),
    ("entities_money", "# Named Entities Money", "discourse", "count"),
    ("entities_ordinal", "# Named Entities Ordinal", "discourse", "count"),
    ("coordinating_conjunctions", "# Coordinating Conjunctions", "syntactic", "count"),
    ("nouns", "# Nouns", "lexical", "count"),
    ("numerals", "# Numerals", "lexical", "count"),
    ("proper_nouns", "# Proper Nouns", "lexical", "count"),
    ("subordinating_conjunctions", "# Subordinating Conjunctions", "syntactic", "count"),
    ("automated_readability_index", "Automated Readability Index", "discourse", "grade"),
    ("reading_time", "Reading Time For Average Readers", "discourse", "seconds"),
    ("verbs", "# Verbs", "lexical", "count"),
    ("adjectives", "# Adjectives", "lexical", "count"),
    ("adverbs", "# Adverbs", "lexical", "count"),
    ("unique_words", "# Unique Words", "lexical", "count"),
]

REGISTRY: tuple[AttributeSpec, ...] = tuple(
    AttributeSpec(i, key, name, group, unit, added=i >= 36)
    for i, (key, name, group, unit) in enumerate(_TABLE)
)
K = len(REGISTRY)
KEYS = tuple(a.key for a in REGISTRY)
NAMES = tuple(a.name for a in REGISTRY)
_BY_KEY = {a.key: a for a in REGISTRY}
_BY_NAME = {a.name.lower(): a for a in REGISTRY}


def lookup(ref: int | str) -> AttributeSpec:
    """Find an attribute by id, key (``"clauses"``) or case-insensitive name."""
    if isinstance(ref, int) and not isinstance(ref, bool):
        if 0 <= ref < K:
            return REGISTRY[ref]
    elif isinstance(ref, str):
        spec = _BY_KEY.get(ref) or _BY_NAME.get(ref.lower())
        if spec is not None:
            return spec
    raise KeyError(f"unknown attribute {ref!r}")


def group_of(ref: int | str) -> str:
    return lookup(ref).group


def group_indices(group: str) -> list[int]:
    if group not in GROUPS:
        raise KeyError(f"unknown group {group!r}")
    return [a.id for a in REGISTRY if a.group == group]


def registry_json() -> str:
    return json.dumps([asdict(a) for a in REGISTRY], indent=1)
