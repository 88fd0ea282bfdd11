"""Bundled word lists under ``attrs/data``, loaded once per process."""
from __future__ import annotations

from functools import lru_cache
from importlib import resources

_DATA = "paracontrol.attrs.data"

# OOV value for the age-of-acquisition lexicon, in years
AOA_DEFAULT = 12.0


def _lines(name: str) -> list[str]:
    text = resources.files(_DATA).joinpath(name).read_text(encoding="utf-8")
    return [ln.rstrip("\n") for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]


@lru_cache(maxsize=None)
def word_set(name: str) -> frozenset[str]:
    return frozenset(ln.strip() for ln in _lines(name))


def stopwords() -> frozenset[str]:
    return word_set("stopwords.txt")


def frequent_words() -> frozenset[str]:
    """The 2000 most frequent English words; anything else counts as sophisticated."""
    return word_set("freq_top2000.txt")


@lru_cache(maxsize=None)
def aoa_table() -> dict[str, float]:
    table = {}
    for ln in _lines("aoa.txt"):
        word, value = ln.split("\t")
        table[word] = float(value)
    return table


@lru_cache(maxsize=None)
def closed_class() -> dict[str, tuple[str, ...]]:
    out = {}
    for ln in _lines("closed_class.txt"):
        word, tags = ln.split("\t")
        out[word] = tuple(tags.split(","))
    return out


def _double_final(base: str) -> bool:
    vowels = "aeiou"
    groups = 0
    prev = False
    for ch in base:
        v = ch in vowels
        if v and not prev:
            groups += 1
        prev = v
    return (groups == 1 and len(base) >= 3 and base[-1] not in vowels + "wxy"
            and base[-2] in vowels and base[-3] not in vowels)


def _inflect(base: str) -> dict[str, str]:
    if base.endswith(("s", "x", "z", "ch", "sh", "o")):
        third = base + "es"
    elif base.endswith("y") and base[-2:-1] not in ("a", "e", "i", "o", "u"):
        third = base[:-1] + "ies"
    else:
        third = base + "s"
    if base.endswith("ie"):
        ing = base[:-2] + "ying"
    elif base.endswith("e") and not base.endswith(("ee", "ye", "oe")):
        ing = base[:-1] + "ing"
    elif _double_final(base):
        ing = base + base[-1] + "ing"
    else:
        ing = base + "ing"
    if base.endswith("e"):
        past = base + "d"
    elif base.endswith("y") and base[-2:-1] not in ("a", "e", "i", "o", "u"):
        past = base[:-1] + "ied"
    elif _double_final(base):
        past = base + base[-1] + "ed"
    else:
        past = base + "ed"
    return {"base": base, "3sg": third, "ing": ing, "past": past, "ppart": past}


@lru_cache(maxsize=None)
def verb_forms() -> dict[str, tuple[str, str]]:
    """Surface form -> (base, form) where form is base/3sg/past/ppart/ing."""
    out: dict[str, tuple[str, str]] = {}
    for ln in _lines("verbs.txt"):
        parts = ln.split("\t")
        base = parts[0]
        forms = _inflect(base)
        if len(parts) == 3:
            forms["past"], forms["ppart"] = parts[1], parts[2]
        # earlier keys win on collisions, so finite readings take precedence
        for form in ("base", "3sg", "past", "ppart", "ing"):
            out.setdefault(forms[form], (base, form))
    return out


def adjectives() -> frozenset[str]:
    return word_set("adjectives.txt")


def nouns() -> frozenset[str]:
    return word_set("nouns.txt")


def number_words() -> frozenset[str]:
    return word_set("numbers.txt")


def ordinal_words() -> frozenset[str]:
    return word_set("ordinals.txt")


def law_heads() -> frozenset[str]:
    return word_set("law_heads.txt")


def currency_words() -> frozenset[str]:
    return word_set("currency.txt")


@lru_cache(maxsize=None)
def gazetteer(name: str) -> tuple[tuple[str, ...], ...]:
    """Entries as token tuples, longest first for greedy matching."""
    entries = {tuple(ln.split()) for ln in _lines(name)}
    return tuple(sorted(entries, key=lambda e: (-len(e), e)))
