"""Compute the 40 registry attributes of a text."""
from __future__ import annotations

import re

import numpy as np

from paracontrol.attrs import lexicon
from paracontrol.attrs.registry import KEYS
from paracontrol.attrs.text import (
    _ORDINAL_DIGITS,
    FINITE_AUX,
    POSSESSIVES,
    RELATIVE_MARKERS,
    Token,
    TokenizedText,
    tokenize,
)

LEXICAL_POS = frozenset({"NOUN", "PROPN", "VERB", "ADJ", "ADV"})
_MONEY_SYMBOL = re.compile(r"[$€£¥]\s?\d[\d,]*(?:\.\d+)?(?:\s+(?:thousand|million|billion))?")
_ALPHA_WORD = re.compile(r"[^\W\d_]+(?:'[^\W\d_]+)*")
_WH_MARKERS = frozenset("what where when why how whether".split())

# words per minute for an average adult reader
READING_WPM = 240.0


class UnmeasurableText(ValueError):
    """The text contains no words, so its attributes are undefined."""


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def _is_finite_start(tokens: list[Token], k: int) -> bool:
    t = tokens[k]
    prev = tokens[k - 1] if k > 0 else None
    if prev is not None and prev.lower == "to" and prev.pos == "PART":
        return False
    if t.clitic == "aux":
        return True
    if t.pos == "AUX":
        host = t.lower[:-3] if t.clitic == "neg" else t.lower
        return host in FINITE_AUX or t.clitic == "neg"
    if t.pos == "VERB":
        if t.form in ("3sg", "past"):
            return True
        if t.form == "base":
            return prev is None or prev.pos in ("PRON", "NOUN", "PROPN") or prev.clitic == "neg"
    return False


def verb_groups(tokens: list[Token]) -> list[tuple[int, bool]]:
    """(start index, finite?) for each maximal auxiliary/verb run in a sentence.

    Adverbs and negation may sit inside a run; punctuation ends it.
    """
    groups = []
    in_group = False
    # a fronted auxiliary ("Did you see", "What can we do") waits for its verb after the subject
    pending = False
    for k, t in enumerate(tokens):
        verbal = t.pos in ("AUX", "VERB") or t.clitic == "aux"
        bridge = t.pos == "ADV" or (t.pos == "PART" and t.lower in ("not", "n't"))
        if verbal and not in_group:
            if pending and t.pos == "VERB" and t.form in ("base", "ing", "ppart"):
                groups.append((k, False))
                pending = False
            else:
                fronted = t.pos == "AUX" and (k == 0 or tokens[k - 1].lower in _WH_MARKERS)
                groups.append((k, _is_finite_start(tokens, k)))
                pending = fronted
            in_group = True
        elif verbal and t.pos == "VERB":
            pending = False
        elif not verbal and not bridge:
            in_group = False
        if t.punct_after:
            in_group = False
            pending = False
    return groups


def _subordination_markers(tokens: list[Token]) -> list[int]:
    marks = []
    for k, t in enumerate(tokens):
        if t.pos == "SCONJ":
            marks.append(k)
        elif k > 0 and t.lower in RELATIVE_MARKERS and t.pos == "PRON":
            marks.append(k)
        elif k > 0 and t.lower in _WH_MARKERS and t.pos in ("DET", "PRON", "ADV"):
            marks.append(k)
    return marks


def sentence_structure(tokens: list[Token]) -> dict[str, int]:
    """Clause, dependent clause, T-unit and complex T-unit counts of one sentence."""
    groups = verb_groups(tokens)
    finite = [k for k, fin in groups if fin]
    clauses = len(finite)
    marks = _subordination_markers(tokens)
    introducing = sum(1 for m in marks if any(f > m for f in finite))
    dependent = min(introducing, max(clauses - 1, 0))
    t_units = max(clauses - dependent, 1)
    return {
        "clauses": clauses,
        "dependent_clauses": dependent,
        "t_units": t_units,
        "complex_t_units": min(dependent, t_units),
    }


def complex_nominals(tokens: list[Token]) -> int:
    """Noun heads with an adjectival/possessive premodifier or a PP/relative postmodifier."""
    count = 0
    k = 0
    n = len(tokens)
    while k < n:
        if tokens[k].pos not in ("NOUN", "PROPN"):
            k += 1
            continue
        start = k
        while k + 1 < n and tokens[k + 1].pos in ("NOUN", "PROPN") and not tokens[k].punct_after:
            k += 1
        head = k
        complex_ = any(tokens[j].clitic == "poss" for j in range(start, head))
        j = start - 1
        while j >= 0 and tokens[j].pos in ("ADJ", "NUM", "DET", "PRON", "ADV") and not tokens[j].punct_after:
            t = tokens[j]
            if t.pos == "ADJ" or t.lower in POSSESSIVES or t.clitic == "poss":
                complex_ = True
            if t.pos in ("DET", "PRON"):
                break
            j -= 1
        if j >= 0 and tokens[j].clitic == "poss" and tokens[j].pos in ("NOUN", "PROPN"):
            complex_ = True
        if head + 1 < n and not tokens[head].punct_after:
            nxt = tokens[head + 1]
            if nxt.pos == "ADP" or (nxt.pos == "PRON" and nxt.lower in RELATIVE_MARKERS):
                complex_ = True
        count += complex_
        k = head + 1
    return count


def _strip_poss(t: Token) -> str:
    return t.surface[:-2] if t.clitic == "poss" else t.surface


def _match_gazetteer(surfaces: list[str], taken: list[bool], name: str) -> int:
    found = 0
    entries = lexicon.gazetteer(name)
    k = 0
    while k < len(surfaces):
        hit = 0
        if not taken[k]:
            for entry in entries:
                m = len(entry)
                if tuple(surfaces[k:k + m]) == entry and not any(taken[k:k + m]):
                    hit = m
                    break
        if hit:
            found += 1
            for j in range(k, k + hit):
                taken[j] = True
            k += hit
        else:
            k += 1
    return found


def entity_counts(tt: TokenizedText) -> dict[str, int]:
    toks = list(tt.tokens)
    surfaces = [_strip_poss(t) for t in toks]
    taken = [False] * len(toks)
    gpe = _match_gazetteer(surfaces, taken, "gpe.txt")
    norp = _match_gazetteer(surfaces, taken, "norp.txt")
    heads = lexicon.law_heads()
    law = sum(
        1 for k, t in enumerate(toks)
        if surfaces[k] in heads and k > 0 and toks[k - 1].sentence == t.sentence
    )
    money = len(_MONEY_SYMBOL.findall(tt.text))
    currency = lexicon.currency_words()
    for k, t in enumerate(toks):
        if t.lower in currency and k > 0 and toks[k - 1].pos == "NUM":
            money += 1
    ordinal = sum(1 for t in toks if t.lower in lexicon.ordinal_words() or _ORDINAL_DIGITS.match(t.lower))
    return {"norp": norp, "gpe": gpe, "law": law, "money": money, "ordinal": ordinal}


def extract_from_tokens(tt: TokenizedText) -> np.ndarray:
    toks = tt.tokens
    n_words = len(toks)
    if n_words == 0:
        raise UnmeasurableText("text has no words")
    n_sent = tt.n_sentences
    frequent = lexicon.frequent_words()
    stop = lexicon.stopwords()
    aoa = lexicon.aoa_table()

    lowers = [t.lower for t in toks]
    soph = [bool(_ALPHA_WORD.fullmatch(w)) and w not in frequent for w in lowers]
    lexical = [t.pos in LEXICAL_POS for t in toks]
    verbs = [t.lower for t in toks if t.pos == "VERB"]
    adjs = [t.lower for t in toks if t.pos == "ADJ"]
    advs = [t.lower for t in toks if t.pos == "ADV"]
    n_lex = sum(lexical)

    uniq_soph = {w for w, s in zip(lowers, soph) if s}
    uniq_lex = {w for w, lx in zip(lowers, lexical) if lx}
    uniq_soph_lex = {w for w, s, lx in zip(lowers, soph, lexical) if s and lx}
    soph_verbs = {t.lower for t, s in zip(toks, soph) if s and t.pos == "VERB"}

    chars = sum(t.chars for t in toks)
    syllables = sum(t.syllables for t in toks)

    structure = {"clauses": 0, "dependent_clauses": 0, "t_units": 0, "complex_t_units": 0}
    nominals = 0
    for s in range(n_sent):
        stoks = list(tt.sentence_tokens(s))
        for key, val in sentence_structure(stoks).items():
            structure[key] += val
        nominals += complex_nominals(stoks)

    ents = entity_counts(tt)
    values = {
        "unique_sophisticated_words": len(uniq_soph),
        "unique_lexical_words": len(uniq_lex),
        "unique_sophisticated_lexical_words": len(uniq_soph_lex),
        "total_words": n_words,
        "total_sophisticated_words": sum(soph),
        "lexical_sophistication_unique": _ratio(len(uniq_soph_lex), len(uniq_lex)),
        "verb_sophistication": _ratio(len(soph_verbs), len(verbs)),
        "ratio_unique_words": _ratio(len(set(lowers)), n_words),
        "ratio_unique_verbs": _ratio(len(set(verbs)), n_lex),
        "ratio_unique_adjectives": _ratio(len(set(adjs)), n_lex),
        "ratio_unique_adverbs": _ratio(len(set(advs)), n_lex),
        "dependent_clauses": structure["dependent_clauses"],
        "clauses": structure["clauses"],
        "t_units": structure["t_units"],
        "complex_t_units": structure["complex_t_units"],
        "complex_nominals": nominals,
        "stop_words": sum(1 for w in lowers if w in stop),
        "sentences": n_sent,
        "characters": chars,
        "words_per_sentence": n_words / n_sent,
        "characters_per_sentence": chars / n_sent,
        "characters_per_word": chars / n_words,
        "syllables_per_sentence": syllables / n_sent,
        "total_age_of_acquisition": sum(aoa.get(w, lexicon.AOA_DEFAULT) for w in lowers),
        "entities_norp": ents["norp"],
        "entities_gpe": ents["gpe"],
        "entities_law": ents["law"],
        "entities_money": ents["money"],
        "entities_ordinal": ents["ordinal"],
        "coordinating_conjunctions": sum(1 for t in toks if t.pos == "CCONJ"),
        "nouns": sum(1 for t in toks if t.pos == "NOUN"),
        "numerals": sum(1 for t in toks if t.pos == "NUM"),
        "proper_nouns": sum(1 for t in toks if t.pos == "PROPN"),
        "subordinating_conjunctions": sum(1 for t in toks if t.pos == "SCONJ"),
        "automated_readability_index": automated_readability_index(chars, n_words, n_sent),
        "reading_time": n_words * 60.0 / READING_WPM,
        "verbs": len(verbs),
        "adjectives": len(adjs),
        "adverbs": len(advs),
        "unique_words": len(set(lowers)),
    }
    return np.array([float(values[key]) for key in KEYS], dtype=np.float64)


def automated_readability_index(chars: int, words: int, sentences: int) -> float:
    return 4.71 * (chars / words) + 0.5 * (words / sentences) - 21.43


def extract(text: str) -> np.ndarray:
    """Raw attribute vector of ``text`` in registry order.

    Raises :class:`UnmeasurableText` when the text has no words.
    """
    return extract_from_tokens(tokenize(text))
