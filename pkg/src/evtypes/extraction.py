"""Rule-based extraction of ⟨predicate, object head⟩ pairs from parses.

Predicates are non-auxiliary verb tokens. A predicate with an auxpass
dependent is passive: its heads are SUBJECT-labeled children occurring before
it. Otherwise it is active: heads are OBJECT-labeled children occurring after
it. Quantifier and number heads ("hundreds of people") hand over to the
object of their partitive "of" phrase.

Objectless predicates produce no occurrence. Unknown dependency labels are
never an error; they simply match no rule.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass

SUBJECT_LABELS = frozenset(
    {"nsubj", "nsubjpass", "csubj", "csubjpass", "agent", "expl"}
)
OBJECT_LABELS = frozenset({"dobj", "dative", "attr", "oprd"})
AUXILIARY_LABELS = frozenset({"aux", "auxpass"})

# closed list of quantity nouns whose partitive "of" phrase carries the real head
QUANTIFIER_LEMMAS = frozenset(
    {
        "hundred",
        "thousand",
        "million",
        "dozen",
        "number",
        "group",
        "lot",
        "couple",
        "majority",
        "percent",
        "part",
        "series",
    }
)

NOMINAL_POS = frozenset({"NOUN", "PROPN", "PRON", "NUM"})


class Voice(enum.Enum):
    ACTIVE = "active"
    PASSIVE = "passive"


@dataclass(frozen=True)
class Token:
    index: int
    text: str
    lemma: str
    pos: str
    dep_label: str
    head: int | None  # None marks the root


@dataclass(frozen=True)
class ParsedSentence:
    sentence_id: str
    tokens: tuple[Token, ...]
    text: str = ""

    def __post_init__(self):
        n = len(self.tokens)
        indices = [t.index for t in self.tokens]
        if indices != list(range(n)):
            raise ValueError(
                f"{self.sentence_id}: token indices must be 0..{n - 1} in order"
            )
        for tok in self.tokens:
            if tok.head is not None and not 0 <= tok.head < n:
                raise ValueError(
                    f"{self.sentence_id}: token {tok.index} has head {tok.head} "
                    f"outside the sentence"
                )
            if tok.head == tok.index:
                raise ValueError(
                    f"{self.sentence_id}: token {tok.index} heads itself"
                )

    def children(self, index: int) -> list[Token]:
        return [t for t in self.tokens if t.head == index]


@dataclass(frozen=True)
class POOccurrence:
    sentence_id: str
    predicate_index: int
    predicate_lemma: str
    voice: Voice
    object_head_index: int
    object_head_lemma: str

    def __post_init__(self):
        if self.voice is Voice.PASSIVE and self.object_head_index >= self.predicate_index:
            raise ValueError("passive object head must precede the predicate")
        if self.voice is Voice.ACTIVE and self.object_head_index <= self.predicate_index:
            raise ValueError("active object head must follow the predicate")


def find_candidate_predicates(s: ParsedSentence) -> list[int]:
    return [
        t.index
        for t in s.tokens
        if t.pos == "VERB" and t.dep_label not in AUXILIARY_LABELS
    ]


def detect_voice(s: ParsedSentence, p: int) -> Voice:
    if p not in find_candidate_predicates(s):
        raise ValueError(f"{s.sentence_id}: token {p} is not a candidate predicate")
    for child in s.children(p):
        if child.dep_label == "auxpass":
            return Voice.PASSIVE
    return Voice.ACTIVE


def _descend_partitive(
    s: ParsedSentence, start: int, p: int, voice: Voice, quantifiers: frozenset[str]
) -> int:
    """Follow "of"-phrases below quantifier/number heads to the content noun.

    Descent stops rather than cross the predicate: the directionality
    invariant (passive heads before, active heads after) must survive.
    """
    current = s.tokens[start]
    visited = {start}
    while current.lemma.lower() in quantifiers or current.pos == "NUM":
        target = None
        for prep in s.children(current.index):
            if prep.dep_label != "prep" or prep.lemma.lower() != "of":
                continue
            for obj in s.children(prep.index):
                if obj.dep_label == "pobj" and obj.pos in NOMINAL_POS:
                    target = obj
                    break
            if target is not None:
                break
        if target is None or target.index in visited:
            break
        if voice is Voice.PASSIVE and target.index >= p:
            break
        if voice is Voice.ACTIVE and target.index <= p:
            break
        visited.add(target.index)
        current = target
    return current.index


def extract_object_heads(
    s: ParsedSentence,
    p: int,
    voice: Voice,
    quantifiers: frozenset[str] = QUANTIFIER_LEMMAS,
) -> list[int]:
    if voice is not detect_voice(s, p):
        raise ValueError(f"{s.sentence_id}: voice does not match predicate {p}")
    heads = []
    for child in s.children(p):
        if voice is Voice.PASSIVE:
            if child.index < p and child.dep_label in SUBJECT_LABELS:
                heads.append(child.index)
        else:
            if child.index > p and child.dep_label in OBJECT_LABELS:
                heads.append(child.index)
    return [_descend_partitive(s, h, p, voice, quantifiers) for h in heads]


def extract_po_occurrences(
    s: ParsedSentence, quantifiers: frozenset[str] = QUANTIFIER_LEMMAS
) -> list[POOccurrence]:
    out = []
    for p in find_candidate_predicates(s):
        voice = detect_voice(s, p)
        for h in extract_object_heads(s, p, voice, quantifiers):
            out.append(
                POOccurrence(
                    sentence_id=s.sentence_id,
                    predicate_index=p,
                    predicate_lemma=s.tokens[p].lemma.lower(),
                    voice=voice,
                    object_head_index=h,
                    object_head_lemma=s.tokens[h].lemma.lower(),
                )
            )
    out.sort(key=lambda o: (o.predicate_index, o.object_head_index))
    return out


def aggregate_pairs(occurrences) -> Counter:
    """Multiset count keyed by (predicate_lemma, object_head_lemma)."""
    return Counter(
        (o.predicate_lemma, o.object_head_lemma) for o in occurrences
    )
