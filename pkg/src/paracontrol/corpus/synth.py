"""Template sentences and rule-based rewrites for a small paraphrase corpus.

A *frame* fixes the content of a sentence (who did what to which object,
where, when, why, what happened next). A *realization* fixes the surface
choices that do not change that content: plain or formal vocabulary,
active or passive voice, where and how the reason is phrased, how money is
written, whether the follow-up event is joined or split off, whether
negation is contracted and how long times and places are spelled out.
Source and target of a pair share a frame and differ in their realization.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from paracontrol.corpus.pairs import ParaphrasePair

SUBJECTS = [("the", "teacher"), ("the", "doctor"), ("my", "neighbor"), ("the", "farmer"),
            ("the", "student"), ("the", "driver"), ("our", "manager"), ("the", "artist"),
            ("the", "pilot"), ("the", "nurse"), ("the", "engineer"), ("her", "friend")]

# (plain past, plain participle, formal past, formal participle)
VERBS = [("bought", "bought", "purchased", "purchased"),
         ("fixed", "fixed", "repaired", "repaired"),
         ("saw", "seen", "observed", "observed"),
         ("built", "built", "constructed", "constructed"),
         ("got", "gotten", "obtained", "obtained"),
         ("showed", "shown", "demonstrated", "demonstrated"),
         ("used", "used", "utilized", "utilized"),
         ("needed", "needed", "required", "required"),
         ("found", "found", "discovered", "discovered"),
         ("made", "made", "created", "created"),
         ("checked", "checked", "inspected", "inspected"),
         ("chose", "chosen", "selected", "selected"),
         ("kept", "kept", "retained", "retained"),
         ("painted", "painted", "decorated", "decorated"),
         ("cleaned", "cleaned", "sanitized", "sanitized")]

OBJECTS = ["car", "house", "bicycle", "bridge", "computer", "report", "garden", "machine",
           "boat", "roof", "fence", "kitchen", "letter", "window"]

ADJECTIVES = [("big", "enormous"), ("old", "ancient"), ("new", "modern"), ("small", "tiny"),
              ("nice", "pleasant"), ("cheap", "inexpensive")]

ADVERBS = [("quickly", "rapidly"), ("carefully", "cautiously"), ("finally", "eventually")]

PLACES = [("Paris", "city"), ("London", "city"), ("Berlin", "city"), ("Tokyo", "city"),
          ("Canada", "country"), ("France", "country"), ("Texas", "state"), ("Madrid", "city"),
          ("Chicago", "city"), ("Boston", "city")]

# (short, long) wording of the same time
TIMES = [("yesterday", "on the previous day"), ("last week", "at some point during the last week"),
         ("on the first day", "on the very first day of the trip"),
         ("on the second day", "on the second day of the visit"),
         ("in the morning", "at an early hour in the morning"),
         ("for the third time", "for the third time in a row")]

# (finite clause, noun phrase) expressing the same cause
REASONS = [("it was raining", "the rain"), ("the price was low", "the low price"),
           ("the weather was cold", "the cold weather"), ("the boss asked them", "the request of the boss"),
           ("there was a storm", "the storm")]

# (plain past, formal past, plain base, formal base) of a follow-up event
FOLLOW_UPS = [("went home", "returned home", "go home", "return home"),
              ("left early", "departed early", "leave early", "depart early"),
              ("called a friend", "telephoned a friend", "call a friend", "telephone a friend"),
              ("wrote a note", "composed a note", "write a note", "compose a note")]

AMOUNTS = [5, 20, 50, 100, 300]

# (short, long) wording of who benefited
PURPOSES = [("for the family", "for the benefit of the whole family"),
            ("for the school", "for the use of the local school"),
            ("for the museum", "for the collection of the city museum")]

NATIONALITIES = ["French", "German", "Italian", "Canadian", "Japanese"]

COMPANIONS = ["the nurse", "a neighbor", "two students", "the old farmer", "an artist"]


@dataclass(frozen=True)
class Frame:
    subject: int
    verb: int
    obj: int
    adjective: int | None
    adverb: int | None
    place: int | None
    time: int | None
    reason: int | None
    amount: int | None
    follow_up: int | None
    negated: bool
    nationality: int | None = None
    companion: int | None = None
    purpose: int | None = None


@dataclass(frozen=True)
class Realization:
    formal_verb: bool
    formal_adj: bool
    formal_adv: bool
    formal_follow_up: bool
    passive: bool
    reason_form: int   # 0 "Because C, S"; 1 "S because C"; 2 "S because of N"; 3 "Due to N, S"
    money_symbol: bool
    split_follow_up: bool
    contracted: bool
    verbose: bool = False


def _opt(rng, n, p=0.5):
    return int(rng.integers(n)) if rng.random() < p else None


def sample_frame(rng: np.random.Generator) -> Frame:
    return Frame(
        subject=int(rng.integers(len(SUBJECTS))),
        verb=int(rng.integers(len(VERBS))),
        obj=int(rng.integers(len(OBJECTS))),
        adjective=_opt(rng, len(ADJECTIVES), 0.6),
        adverb=_opt(rng, len(ADVERBS), 0.4),
        place=_opt(rng, len(PLACES), 0.4),
        time=_opt(rng, len(TIMES), 0.4),
        reason=_opt(rng, len(REASONS), 0.5),
        amount=_opt(rng, len(AMOUNTS), 0.3),
        follow_up=_opt(rng, len(FOLLOW_UPS), 0.5),
        negated=bool(rng.random() < 0.4),
        nationality=_opt(rng, len(NATIONALITIES), 0.2),
        companion=_opt(rng, len(COMPANIONS), 0.3),
        purpose=_opt(rng, len(PURPOSES), 0.3),
    )


def sample_realization(rng: np.random.Generator) -> Realization:
    bits = rng.random(9) < 0.5
    return Realization(
        formal_verb=bool(bits[0]),
        formal_adj=bool(bits[1]),
        formal_adv=bool(bits[2]),
        formal_follow_up=bool(bits[3]),
        passive=bool(bits[4]),
        reason_form=int(rng.integers(4)),
        money_symbol=bool(bits[5]),
        split_follow_up=bool(bits[6]),
        contracted=bool(bits[7]),
        verbose=bool(bits[8]),
    )


def _cap(s: str) -> str:
    return s[:1].upper() + s[1:]


def realize(f: Frame, r: Realization) -> str:
    det, noun = SUBJECTS[f.subject]
    if f.nationality is not None:
        noun = f"{NATIONALITIES[f.nationality]} {noun}"
    subject = f"{det} {noun}"
    adj = ""
    if f.adjective is not None:
        adj = ADJECTIVES[f.adjective][int(r.formal_adj)] + " "
    obj = f"the {adj}{OBJECTS[f.obj]}"
    verb = VERBS[f.verb]
    adv = ADVERBS[f.adverb][int(r.formal_adv)] + " " if f.adverb is not None else ""
    if r.passive:
        core = f"{obj} was {adv}{verb[3 if r.formal_verb else 1]} by {subject}"
    else:
        core = f"{subject} {adv}{verb[2 if r.formal_verb else 0]} {obj}"

    tail = []
    if f.companion is not None:
        tail.append(f"together with {COMPANIONS[f.companion]}")
    if f.purpose is not None:
        tail.append(PURPOSES[f.purpose][int(r.verbose)])
    if f.amount is not None:
        amount = AMOUNTS[f.amount]
        tail.append(f"for ${amount}" if r.money_symbol else f"for {amount} dollars")
    if f.place is not None:
        name, kind = PLACES[f.place]
        tail.append(f"in the {kind} of {name}" if r.verbose else f"in {name}")
    if f.time is not None:
        tail.append(TIMES[f.time][int(r.verbose)])
    head = ""
    if f.reason is not None:
        clause, nominal = REASONS[f.reason]
        if r.reason_form == 0:
            head = f"because {clause}, "
        elif r.reason_form == 1:
            tail.append(f"because {clause}")
        elif r.reason_form == 2:
            tail.append(f"because of {nominal}")
        else:
            head = f"due to {nominal}, "
    sentence = _cap(head + core + "".join(" " + t for t in tail))

    if f.follow_up is not None:
        event = FOLLOW_UPS[f.follow_up]
        if f.negated:
            neg = "didn't" if r.contracted else "did not"
            what = f"{neg} {event[3 if r.formal_follow_up else 2]}"
        else:
            what = event[1 if r.formal_follow_up else 0]
        if r.split_follow_up:
            return f"{sentence}. Then they {what}."
        return f"{sentence}, and then they {what}."
    return sentence + "."


def synth_corpus(n: int, seed: int) -> list[ParaphrasePair]:
    """``n`` paraphrase pairs; no text is shared between two pairs."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    used: set[str] = set()
    pairs = []
    attempts = 0
    while len(pairs) < n:
        attempts += 1
        if attempts > 50 * n + 1000:
            raise RuntimeError("template space exhausted")
        frame = sample_frame(rng)
        src = realize(frame, sample_realization(rng))
        tgt = src
        for _ in range(20):
            tgt = realize(frame, sample_realization(rng))
            if tgt != src:
                break
        if tgt == src or src in used or tgt in used:
            continue
        used.update((src, tgt))
        pairs.append(ParaphrasePair.from_texts(src, tgt))
    return pairs
