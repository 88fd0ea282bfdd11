from pathlib import Path

import pytest

from paracontrol.attrs import GROUPS, K, KEYS, UnmeasurableText, extract, group_indices, lookup, tokenize
from paracontrol.attrs.registry import registry_json
from paracontrol.attrs.text import count_syllables

DATA = Path(__file__).parents[1] / "src" / "paracontrol" / "attrs" / "data"


def tags(text):
    return [(t.surface, t.pos) for t in tokenize(text).tokens]


@pytest.mark.parametrize("word, n", [
    ("cat", 1), ("table", 2), ("make", 1), ("see", 1), ("watched", 1), ("wanted", 2),
    ("houses", 2), ("boxes", 2), ("likes", 1), ("beautiful", 3), ("movie", 2), ("the", 1),
    ("machine", 2), ("20", 1),
])
def test_syllables(word, n):
    assert count_syllables(word) == n


def test_tokenizer_splits_sentences_and_offsets():
    tt = tokenize("Dr Smith left. He didn't return! Why?")
    assert tt.n_sentences == 3
    for t in tt.tokens:
        assert tt.text[t.start:t.end] == t.surface
    assert [t.surface for t in tt.sentence_tokens(1)] == ["He", "didn't", "return"]
    assert tt.tokens[-1].sentence == 2


def test_contractions_and_possessives():
    toks = tokenize("She's sure the farmer's dog can't swim.").tokens
    by = {t.surface: t for t in toks}
    # a contraction stays one word and records what was attached
    assert len(toks) == 7
    assert by["She's"].clitic == "aux"
    assert by["farmer's"].clitic == "poss" and by["farmer's"].pos == "NOUN"
    assert by["can't"].clitic == "neg"


@pytest.mark.parametrize("text, word, tag", [
    ("The race was long.", "race", "NOUN"),
    ("They race every day.", "race", "VERB"),
    ("He sold her work.", "work", "NOUN"),
    ("The kids played outside.", "outside", "ADV"),
    ("The dog sat outside the house.", "outside", "ADP"),
    ("Once he left, we ate.", "Once", "SCONJ"),
    ("I met him once.", "once", "ADV"),
    ("The French chef cooked.", "French", "ADJ"),
    ("We visited Paris.", "Paris", "PROPN"),
])
def test_disambiguation(text, word, tag):
    assert dict(tags(text))[word] == tag


def test_fronted_auxiliary_question_has_one_clause():
    v = dict(zip(KEYS, extract("Did you visit Paris last summer?")))
    assert v["clauses"] == 1 and v["verbs"] == 1


def test_subordination_counts():
    v = dict(zip(KEYS, extract("Because it rained, we stayed home and the dog slept.")))
    assert (v["clauses"], v["dependent_clauses"], v["t_units"], v["complex_t_units"]) == (3, 1, 2, 1)


def test_empty_text_is_unmeasurable():
    with pytest.raises(UnmeasurableText):
        extract("  ...  ")


def test_extract_returns_registry_order():
    v = extract("The cat sat.")
    assert v.shape == (K,) and v.dtype.kind == "f"
    assert v[lookup("total_words").id] == 3.0


def test_registry_lookup_and_groups():
    assert lookup("clauses") is lookup("# clauses") is lookup(lookup("clauses").id)
    with pytest.raises(KeyError):
        lookup(K)
    with pytest.raises(KeyError):
        lookup(True)
    assert sorted(i for g in GROUPS for i in group_indices(g)) == list(range(K))
    assert sum(lookup(i).added for i in range(K)) == 4


def test_registry_file_is_in_sync():
    assert (DATA / "registry.json").read_text().strip() == registry_json().strip()


def values(text):
    return dict(zip(KEYS, extract(text)))


MONOTONE_TEXTS = [
    "The old farmer sold two cows at the market.",
    "Because it rained, we stayed inside and read.",
    "Paris is the capital of France.",
]


@pytest.mark.parametrize("text", MONOTONE_TEXTS)
def test_appending_a_sentence_never_lowers_counts(text):
    before, after = values(text), values(text + " She quickly wrote a long letter to her brother.")
    for key in KEYS:
        if lookup(key).unit == "count":
            assert after[key] >= before[key], key
    assert after["sentences"] == before["sentences"] + 1


@pytest.mark.parametrize("text", MONOTONE_TEXTS)
def test_duplicating_a_word_adds_one_word_and_no_unique_word(text):
    words = text.split()
    before, after = values(text), values(" ".join([words[0], words[0].lower()] + words[1:]))
    assert after["total_words"] == before["total_words"] + 1
    assert after["unique_words"] == before["unique_words"]


@pytest.mark.parametrize("text", MONOTONE_TEXTS + ["the the the", "Run!"])
def test_ratio_attributes_lie_in_unit_interval(text):
    v = values(text)
    for key in KEYS:
        if key.startswith("ratio_") or key in ("lexical_sophistication_unique", "verb_sophistication"):
            assert 0.0 <= v[key] <= 1.0, key


def test_short_sentence_by_hand():
    v = values("The cat sat.")
    assert v["total_words"] == 3 and v["characters_per_word"] == 3.0
    assert values("the the the")["ratio_unique_words"] == pytest.approx(1 / 3)
