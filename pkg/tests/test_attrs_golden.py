"""Attribute values against hand-annotated sentences.

The oracle below recomputes every attribute from the annotation file
(tags, syllables, clause and nominal counts, entities). It shares only the
word lists with the package: frequent words, stop words and the
age-of-acquisition table.
"""
import json
import re
import time
from pathlib import Path

import numpy as np
import pytest

from paracontrol.attrs import KEYS, extract, lexicon

FIXTURE = Path(__file__).parent / "fixtures" / "golden_sentences.json"
LEXICAL = {"NOUN", "PROPN", "VERB", "ADJ", "ADV"}


def load_items():
    return json.loads(FIXTURE.read_text())["items"]


def oracle(item) -> dict:
    words = [w for w, _, _ in item["tokens"]]
    tags = [t for _, t, _ in item["tokens"]]
    syl = sum(s for _, _, s in item["tokens"])
    low = [w.lower() for w in words]
    n = len(words)
    sents = item["sentences"]
    frequent = lexicon.frequent_words()
    soph = [bool(re.fullmatch(r"[a-z']+", w)) and w not in frequent for w in low]
    lex = [t in LEXICAL for t in tags]
    n_lex = sum(lex)
    verbs = [w for w, t in zip(low, tags) if t == "VERB"]
    adjs = [w for w, t in zip(low, tags) if t == "ADJ"]
    advs = [w for w, t in zip(low, tags) if t == "ADV"]
    u_soph = {w for w, s in zip(low, soph) if s}
    u_lex = {w for w, x in zip(low, lex) if x}
    u_soph_lex = u_soph & u_lex
    soph_verbs = {w for w, s, t in zip(low, soph, tags) if s and t == "VERB"}
    chars = sum(sum(c.isalnum() for c in w) for w in words)
    aoa = lexicon.aoa_table()
    ent = item["entities"]
    v = {
        "unique_sophisticated_words": len(u_soph),
        "unique_lexical_words": len(u_lex),
        "unique_sophisticated_lexical_words": len(u_soph_lex),
        "total_words": n,
        "total_sophisticated_words": sum(soph),
        "lexical_sophistication_unique": len(u_soph_lex) / len(u_lex) if u_lex else 0.0,
        "verb_sophistication": len(soph_verbs) / len(verbs) if verbs else 0.0,
        "ratio_unique_words": len(set(low)) / n,
        "ratio_unique_verbs": len(set(verbs)) / n_lex,
        "ratio_unique_adjectives": len(set(adjs)) / n_lex,
        "ratio_unique_adverbs": len(set(advs)) / n_lex,
        "dependent_clauses": item["dependent_clauses"],
        "clauses": item["clauses"],
        "t_units": item["t_units"],
        "complex_t_units": item["complex_t_units"],
        "complex_nominals": item["complex_nominals"],
        "stop_words": sum(w in lexicon.stopwords() for w in low),
        "sentences": sents,
        "characters": chars,
        "words_per_sentence": n / sents,
        "characters_per_sentence": chars / sents,
        "characters_per_word": chars / n,
        "syllables_per_sentence": syl / sents,
        "total_age_of_acquisition": sum(aoa.get(w, lexicon.AOA_DEFAULT) for w in low),
        "entities_norp": ent["norp"],
        "entities_gpe": ent["gpe"],
        "entities_law": ent["law"],
        "entities_money": ent["money"],
        "entities_ordinal": ent["ordinal"],
        "coordinating_conjunctions": tags.count("CCONJ"),
        "nouns": tags.count("NOUN"),
        "numerals": tags.count("NUM"),
        "proper_nouns": tags.count("PROPN"),
        "subordinating_conjunctions": tags.count("SCONJ"),
        "automated_readability_index": 4.71 * chars / n + 0.5 * n / sents - 21.43,
        "reading_time": n / 4.0,
        "verbs": len(verbs),
        "adjectives": len(adjs),
        "adverbs": len(advs),
        "unique_words": len(set(low)),
    }
    assert set(v) == set(KEYS)
    return v


def is_count(key):
    from paracontrol.attrs import lookup
    return lookup(key).unit == "count"


@pytest.mark.parametrize("item", load_items(), ids=lambda it: it["text"][:30])
def test_all_attributes_match_annotation(item):
    got = dict(zip(KEYS, extract(item["text"])))
    want = oracle(item)
    for key in KEYS:
        if is_count(key):
            assert got[key] == want[key], key
        else:
            assert got[key] == pytest.approx(want[key], abs=1e-9), key


def test_fixture_is_fast():
    texts = [it["text"] for it in load_items()]
    extract(texts[0])  # warm the word-list caches
    t0 = time.perf_counter()
    for t in texts:
        extract(t)
    assert time.perf_counter() - t0 < 1.0


def test_fixture_covers_every_entity_type_and_multi_sentence_text():
    items = load_items()
    for kind in ("norp", "gpe", "law", "money", "ordinal"):
        assert any(it["entities"][kind] for it in items), kind
    assert any(it["sentences"] > 1 for it in items)
    assert any(it["dependent_clauses"] for it in items)


def test_oracle_example_by_hand():
    # "They bought 20 apples and two large melons.": 4+6+2+6+3+3+5+6 = 35 letters/digits
    item = load_items()[7]
    v = oracle(item)
    assert v["total_words"] == 8 and v["characters"] == 35
    assert v["automated_readability_index"] == pytest.approx(4.71 * 35 / 8 + 0.5 * 8 - 21.43)
    assert np.isclose(v["reading_time"], 2.0)
