"""Sentence splitting, word tokenization and rule-based POS tagging."""
from __future__ import annotations

import re
from dataclasses import dataclass

from paracontrol.attrs import lexicon

TAGS = ("NOUN", "PROPN", "VERB", "AUX", "ADJ", "ADV", "ADP", "DET", "PRON",
        "CCONJ", "SCONJ", "NUM", "PART", "INTJ")

_WORD = re.compile(r"\d+(?:[.,]\d+)+|[^\W_]+(?:'[^\W_]+)*")
_SENT_END = re.compile(r"[.!?]+[\"')\]]*(?=\s|$)")
_DIGITS = re.compile(r"^\d+(?:[.,]\d+)*$")
_ORDINAL_DIGITS = re.compile(r"^\d+(?:st|nd|rd|th)$")
_VOWEL_GROUP = re.compile(r"[aeiouy]+")

SUBJECT_PRONOUNS = frozenset("i you he she it we they".split())
POSSESSIVES = frozenset("my your his her its our their".split())
FINITE_AUX = frozenset("am is are was were has have had do does did can could may might must "
                       "shall should will would ought ca wo".split())
RELATIVE_MARKERS = frozenset("who whom whose which that".split())
_AUX_CLITICS = ("'re", "'ve", "'ll", "'d", "'m")
_PRONOUN_S_HOSTS = frozenset("it he she that what who there here let where how".split())


@dataclass(frozen=True)
class Token:
    surface: str
    lower: str
    pos: str
    syllables: int
    chars: int
    start: int
    end: int
    sentence: int
    form: str = ""       # verb form: base/3sg/past/ppart/ing, "" otherwise
    clitic: str = ""     # "aux", "neg" or "poss" for contracted tokens
    punct_after: str = ""


@dataclass(frozen=True)
class TokenizedText:
    text: str
    sentences: tuple[tuple[int, int], ...]
    tokens: tuple[Token, ...]

    def sentence_tokens(self, i: int) -> tuple[Token, ...]:
        return tuple(t for t in self.tokens if t.sentence == i)

    @property
    def n_sentences(self) -> int:
        return len(self.sentences)

    @property
    def n_words(self) -> int:
        return len(self.tokens)


_VOWELS = "aeiouy"


def _silent_suffix(letters: str) -> bool:
    """True when the final ``e``, ``-ed`` or ``-es`` adds no syllable."""
    if letters.endswith("e"):
        if letters.endswith("le"):
            return len(letters) > 2 and letters[-3] in _VOWELS
        return letters[-2] not in _VOWELS
    if letters.endswith("ed"):
        return letters[-3] not in "td"
    if letters.endswith("es") and len(letters) > 3:
        c = letters[-3]
        if c in "sxzgc" + _VOWELS or letters.endswith(("ches", "shes")):
            return False
        return not (c == "l" and letters[-4] not in _VOWELS)
    return False


def count_syllables(word: str) -> int:
    """Vowel groups, minus a silent final ``e``/``-ed``/``-es``; at least 1 for any word."""
    w = word.lower().replace("'", "")
    letters = "".join(ch for ch in w if ch.isalpha())
    if not letters:
        return 1
    n = len(_VOWEL_GROUP.findall(letters))
    if n > 1 and len(letters) > 2 and _silent_suffix(letters):
        n -= 1
    return max(n, 1)


def _split_clitic(lower: str) -> tuple[str, str]:
    if lower.endswith("n't"):
        return lower[:-3], "neg"
    for c in _AUX_CLITICS:
        if lower.endswith(c):
            return lower[: -len(c)], "aux"
    if lower.endswith("'s"):
        host = lower[:-2]
        return host, ("aux" if host in _PRONOUN_S_HOSTS else "poss")
    return lower, ""


def _suffix_tag(w: str) -> tuple[str, str]:
    if w.endswith("ly") and len(w) > 4:
        return "ADV", ""
    if w.endswith("ing") and len(w) > 5:
        return "VERB", "ing"
    if w.endswith("ed") and len(w) > 4:
        return "VERB", "past"
    if w.endswith(("ize", "ise", "ify", "ate")) and len(w) > 5:
        return "VERB", "base"
    if w.endswith(("ous", "ful", "less", "able", "ible", "ive", "al", "ic", "ish", "ary")) and len(w) > 4:
        return "ADJ", ""
    return "NOUN", ""


def _candidates(lower: str, surface: str, initial: bool) -> list[tuple[str, str]]:
    if _DIGITS.match(lower) or lower in lexicon.number_words():
        return [("NUM", "")]
    if _ORDINAL_DIGITS.match(lower) or lower in lexicon.ordinal_words():
        return [("ADJ", "")]
    cands: list[tuple[str, str]] = []
    closed = lexicon.closed_class().get(lower)
    if closed and lower != "i" and surface[:1].isupper() and not initial:
        closed = None
    if closed:
        cands.extend((t, "") for t in closed)
    if surface[:1].isupper() and not initial and lower != "i":
        # nationality words ("a French chef") modify nouns
        return [("ADJ", "")] if (surface,) in lexicon.gazetteer("norp.txt") else [("PROPN", "")]
    verb = lexicon.verb_forms().get(lower)
    if verb:
        cands.append(("VERB", verb[1]))
    if lower in lexicon.adjectives():
        cands.append(("ADJ", ""))
    if lower in lexicon.nouns():
        cands.append(("NOUN", ""))
    if not cands:
        if initial and surface[:1].isupper() and _in_gazetteer_word(surface):
            return [("PROPN", "")]
        cands.append(_suffix_tag(lower))
    return cands


def _in_gazetteer_word(surface: str) -> bool:
    for name in ("gpe.txt", "norp.txt"):
        for entry in lexicon.gazetteer(name):
            if entry[0] == surface:
                return True
    return False


def _verb_ahead(cands: list[list[tuple[str, str]]], start: int, stops: list[str]) -> bool:
    """True when a finite-looking verb follows before a clause boundary."""
    for j in range(start, min(start + 7, len(cands))):
        tags = [t for t, _ in cands[j]]
        if j > start and ("CCONJ" in tags or "SCONJ" in tags):
            return False
        for t, form in cands[j]:
            if t == "AUX" or (t == "VERB" and form in ("3sg", "past")):
                return True
            if t == "VERB" and form == "base" and j > start:
                prev = [pt for pt, _ in cands[j - 1]]
                if "PRON" in prev or "NOUN" in prev or "PROPN" in prev:
                    return True
        if stops[j]:
            return False
    return False


def _disambiguate(i: int, lower: str, cands, chosen, stops) -> tuple[str, str]:
    tags = [t for t, _ in cands[i]]
    prev_tag = chosen[i - 1][0] if i > 0 else None
    prev_word = chosen[i - 1][2] if i > 0 else None
    nxt = [t for t, _ in cands[i + 1]] if i + 1 < len(cands) else []
    if tags == ["VERB"] and cands[i][0][1] == "base" and (prev_tag in ("DET", "ADJ", "ADP")
                                                         or prev_word in POSSESSIVES):
        # a bare verb stem after a determiner or possessive is a noun ("the race", "her work")
        return ("NOUN", "")
    if len(cands[i]) == 1:
        return cands[i][0]

    def pick(tag):
        for t, f in cands[i]:
            if t == tag:
                return t, f
        return cands[i][0]

    if lower == "to":
        return pick("PART") if "VERB" in nxt and not stops[i] else pick("ADP")
    if lower == "that":
        if prev_tag in ("VERB", "ADJ"):
            return pick("SCONJ")
        if prev_tag in ("NOUN", "PROPN", "PRON") and ("VERB" in nxt or "AUX" in nxt or "ADV" in nxt):
            return pick("PRON")
        if nxt and nxt[0] in ("NOUN", "ADJ", "NUM"):
            return pick("DET")
        return pick("PRON")
    if lower == "which":
        return pick("DET") if nxt and nxt[0] == "NOUN" else pick("PRON")
    if "SCONJ" in tags and "ADP" in tags:
        return pick("SCONJ") if _verb_ahead(cands, i + 1, stops) else pick("ADP")
    if "ADP" in tags and "ADV" in tags:
        takes_object = nxt and nxt[0] in ("DET", "PRON", "NOUN", "PROPN", "ADJ", "NUM") and not stops[i]
        return pick("ADP") if takes_object else pick("ADV")
    if "SCONJ" in tags and "ADV" in tags and lower not in ("when", "where", "why", "how"):
        return pick("SCONJ") if _verb_ahead(cands, i + 1, stops) else pick("ADV")
    if "SCONJ" in tags and lower in ("when", "where", "why", "how"):
        if i == 0 and nxt and nxt[0] == "AUX":
            return ("ADV", "")
        return pick("SCONJ") if _verb_ahead(cands, i + 1, stops) else ("ADV", "")
    if "VERB" in tags:
        verbal_prev = (prev_tag in ("AUX", "PART") or prev_word in SUBJECT_PRONOUNS
                       or prev_word in ("to", "not", "n't"))
        nominal_prev = prev_tag in ("DET", "ADJ", "NUM", "ADP") or prev_word in POSSESSIVES
        if "ADJ" in tags:
            if nxt == ["NOUN"] and not stops[i]:
                return pick("ADJ")
            if prev_tag == "AUX" and prev_word not in ("has", "have", "had", "having"):
                return pick("ADJ")
            if prev_tag in ("DET", "ADV") or nominal_prev:
                return pick("ADJ")
            return pick("VERB")
        if "NOUN" in tags:
            if nominal_prev:
                return pick("NOUN")
            if verbal_prev or prev_tag in ("NOUN", "PROPN", "PRON"):
                return pick("VERB")
            return pick("VERB") if i == 0 else pick("NOUN")
        if verbal_prev or prev_tag in ("NOUN", "PROPN", "PRON"):
            return pick("VERB")
        # closed-class reading (e.g. "like" as a preposition) otherwise
        return cands[i][0]
    return cands[i][0]


def _resolve_aux(tokens: list[list], i: int) -> None:
    """Main-verb readings of have/do when no verb follows."""
    tag, form, lower = tokens[i][:3]
    if tag != "AUX" or lower not in ("have", "has", "had", "having", "do", "does", "did", "doing", "done"):
        return
    j = i + 1
    if i == 0 or tokens[i - 1][2] in ("what", "where", "when", "why", "how", "who", "which"):
        # fronted auxiliary: look past the subject ("Did the old man leave")
        while j < len(tokens) and tokens[j][0] in ("PRON", "DET", "ADJ", "NOUN", "PROPN", "NUM"):
            j += 1
    while j < len(tokens) and (tokens[j][0] == "ADV" or tokens[j][2] in ("not", "n't")):
        j += 1
    if j < len(tokens) and tokens[j][0] in ("VERB", "AUX"):
        return
    forms = {"have": "base", "has": "3sg", "had": "past", "having": "ing",
             "do": "base", "does": "3sg", "did": "past", "doing": "ing", "done": "ppart"}
    tokens[i][0] = "VERB"
    tokens[i][1] = forms[lower]


def _tag_sentence(words: list[tuple[str, int, int, str]]) -> list[tuple[str, str, str]]:
    """Tag one sentence's words; returns (tag, form, clitic) per word."""
    lowers, hosts, clitics, cands, stops = [], [], [], [], []
    for k, (surface, _, _, punct) in enumerate(words):
        lower = surface.lower()
        host, clitic = _split_clitic(lower)
        if clitic and not host:
            host, clitic = lower, ""
        lowers.append(lower)
        hosts.append(host)
        clitics.append(clitic)
        host_surface = surface[: len(host)] if clitic else surface
        if clitic == "neg":
            base = {"ca": "can", "wo": "will", "sha": "shall"}.get(host, host)
            cands.append([("AUX", "")] if base in FINITE_AUX or base in ("can", "will", "shall", "need", "dare")
                         else _candidates(host, host_surface, k == 0))
        else:
            cands.append(_candidates(host, host_surface, k == 0))
        stops.append(bool(punct.strip()))
    chosen: list[list] = []
    for k in range(len(words)):
        tag, form = _disambiguate(k, hosts[k], cands, chosen, stops)
        chosen.append([tag, form, hosts[k]])
    for k in range(len(words)):
        _resolve_aux(chosen, k)
    return [(c[0], c[1], clitics[k]) for k, c in enumerate(chosen)]


def tokenize(text: str) -> TokenizedText:
    """Split ``text`` into sentences and tagged word tokens.

    Sentences end at runs of ``.``, ``!`` or ``?`` followed by whitespace
    or the end of the text; sentences with no words are dropped. Curly
    apostrophes are normalised to ``'``.
    """
    text = text.replace("’", "'")
    bounds = []
    start = 0
    for m in _SENT_END.finditer(text):
        bounds.append((start, m.end()))
        start = m.end()
    if text[start:].strip():
        bounds.append((start, len(text)))
    matches = list(_WORD.finditer(text))
    sentences: list[tuple[int, int]] = []
    tokens: list[Token] = []
    mi = 0
    for s_start, s_end in bounds:
        words = []
        while mi < len(matches) and matches[mi].start() < s_end:
            m = matches[mi]
            mi += 1
            if m.start() >= s_start:
                words.append(m)
        if not words:
            continue
        sid = len(sentences)
        sentences.append((s_start, s_end))
        spans = []
        for k, m in enumerate(words):
            gap_end = words[k + 1].start() if k + 1 < len(words) else s_end
            spans.append((m.group(), m.start(), m.end(), text[m.end():gap_end].strip()))
        tagged = _tag_sentence(spans)
        for (surface, a, b, punct), (tag, form, clitic) in zip(spans, tagged):
            tokens.append(Token(
                surface=surface,
                lower=surface.lower(),
                pos=tag,
                syllables=count_syllables(surface),
                chars=sum(ch.isalnum() for ch in surface),
                start=a,
                end=b,
                sentence=sid,
                form=form,
                clitic=clitic,
                punct_after=punct,
            ))
    return TokenizedText(text=text, sentences=tuple(sentences), tokens=tuple(tokens))
