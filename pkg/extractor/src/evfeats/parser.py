"""Rule-based English tokenizer, tagger, lemmatizer, and dependency grammar.

Scope: simple declarative clauses. Active and passive voice, copulas,
double objects, prepositional phrases, noun and verb coordination, and
"to"-infinitive complements attach with dedicated rules; anything outside
that attaches defensively as `dep` so the output always stays schema-valid
(single ROOT with a null head, every other head in range, labels and tags
drawn from the published inventories). A sentence with no alphanumeric
token is unparseable and yields None.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .lexicon import (
    ADJ_WORDS,
    ADPOSITIONS,
    ADV_WORDS,
    BE_FORMS,
    COORDINATORS,
    DETERMINERS,
    HAVE_DO_FORMS,
    IRREGULAR_NOUNS,
    IRREGULAR_PARTICIPLES,
    IRREGULAR_VERBS,
    MODALS,
    NEGATIONS,
    POSSESSIVES,
    PRONOUNS,
    SUBORDINATORS,
    VERB_BASES,
)

_NUM_RE = re.compile(r"^\d+(?:[.,]\d+)*$")
_ADJ_SUFFIXES = ("ous", "ful", "ive", "less", "able", "ible", "al")

NOMINAL = ("NOUN", "PROPN", "PRON")
CHUNKABLE = ("DET", "ADJ", "NUM", "NOUN", "PROPN", "PRON")


@dataclass(frozen=True)
class Tok:
    index: int
    text: str
    lemma: str
    pos: str
    dep_label: str
    head: int | None


@dataclass(frozen=True)
class Sentence:
    sentence_id: str
    text: str
    tokens: tuple[Tok, ...]


def tokenize(text: str) -> list[str]:
    out: list[str] = []
    for raw in text.split():
        lead: list[str] = []
        trail: list[str] = []
        while raw and not raw[0].isalnum():
            lead.append(raw[0])
            raw = raw[1:]
        while raw and not raw[-1].isalnum():
            trail.append(raw[-1])
            raw = raw[:-1]
        out.extend(lead)
        if raw:
            out.append(raw)
        out.extend(reversed(trail))
    return out


def verb_lemma(lw: str) -> str | None:
    """Base form of a verb token, or None if no analysis reaches the lexicon."""
    if lw in IRREGULAR_VERBS:
        return IRREGULAR_VERBS[lw]
    if lw in VERB_BASES:
        return lw
    candidates: list[str] = []
    if lw.endswith("ies"):
        candidates.append(lw[:-3] + "y")
    if lw.endswith("ied"):
        candidates.append(lw[:-3] + "y")
    if lw.endswith("ing") and len(lw) > 4:
        stem = lw[:-3]
        candidates += [stem, stem + "e"]
        if len(stem) > 2 and stem[-1] == stem[-2]:
            candidates.append(stem[:-1])
    if lw.endswith("ed") and len(lw) > 3:
        stem = lw[:-2]
        candidates += [stem, stem + "e"]
        if len(stem) > 2 and stem[-1] == stem[-2]:
            candidates.append(stem[:-1])
    if lw.endswith("es") and len(lw) > 3:
        candidates += [lw[:-2], lw[:-1]]
    elif lw.endswith("s") and len(lw) > 2:
        candidates.append(lw[:-1])
    for c in candidates:
        if c in VERB_BASES:
            return c
    return None


def noun_lemma(lw: str) -> str:
    if lw in IRREGULAR_NOUNS:
        return IRREGULAR_NOUNS[lw]
    if lw.endswith("ies") and len(lw) > 4:
        return lw[:-3] + "y"
    if lw.endswith(("sses", "xes", "zes", "ches", "shes")):
        return lw[:-2]
    if lw.endswith("s") and len(lw) > 3 and not lw.endswith(("ss", "us", "is")):
        return lw[:-1]
    return lw


def _is_verbish(word: str) -> bool:
    lw = word.lower()
    return lw in BE_FORMS or lw in HAVE_DO_FORMS or lw in MODALS or verb_lemma(lw) is not None


def _is_participle(word: str) -> bool:
    lw = word.lower()
    return lw.endswith("ed") or lw in IRREGULAR_PARTICIPLES


class RuleParser:
    """Deterministic heuristic parser producing pipeline-schema analyses."""

    name = "builtin-rules-v1"

    def parse(self, text: str) -> list[Tok] | None:
        words = tokenize(text)
        if not any(any(c.isalnum() for c in w) for w in words):
            return None
        tags = self._tag(words)
        lemmas = [self._lemma(w, t) for w, t in zip(words, tags)]
        heads, labels = self._attach(words, tags, lemmas)
        return [
            Tok(i, words[i], lemmas[i], tags[i], labels[i], heads[i])
            for i in range(len(words))
        ]

    # ------------------------------------------------------------------
    # tagging

    def _tag(self, words: list[str]) -> list[str]:
        tags: list[str] = []
        for i, w in enumerate(words):
            tags.append(self._tag_one(w, i, words, tags))
        return tags

    def _tag_one(self, w: str, i: int, words: list[str], tags: list[str]) -> str:
        if all(not c.isalnum() for c in w):
            return "PUNCT"
        if _NUM_RE.match(w):
            return "NUM"
        lw = w.lower()
        nxt = words[i + 1].lower() if i + 1 < len(words) else None
        prev_tag = tags[i - 1] if i else None
        if lw == "to":
            return "PART" if nxt is not None and verb_lemma(nxt) == nxt else "ADP"
        if lw in NEGATIONS:
            return "PART"
        if lw == "that":
            return "DET" if nxt is not None and self._nounish(nxt) else "PRON"
        if lw in DETERMINERS:
            return "DET"
        if lw in POSSESSIVES or lw in PRONOUNS:
            return "PRON"
        if lw in BE_FORMS:
            return "AUX"
        if lw in HAVE_DO_FORMS:
            return "AUX" if nxt is not None and _is_verbish(nxt) else "VERB"
        if lw in MODALS:
            return "AUX"
        if lw in ADPOSITIONS:
            return "ADP"
        if lw in COORDINATORS:
            return "CCONJ"
        if lw in SUBORDINATORS:
            return "SCONJ"
        if lw in ADJ_WORDS:
            if (
                lw in VERB_BASES
                and prev_tag in NOMINAL
                and "VERB" not in tags
            ):
                return "VERB"
            return "ADJ"
        if verb_lemma(lw) is not None:
            if prev_tag in ("DET", "NUM", "ADJ", "ADP") or (
                i and words[i - 1].lower() in POSSESSIVES
            ):
                return "NOUN"
            return "VERB"
        if lw in ADV_WORDS or (lw.endswith("ly") and len(lw) > 3):
            return "ADV"
        if lw.endswith(_ADJ_SUFFIXES) and len(lw) > 4:
            return "ADJ"
        if w[0].isupper() and i > 0:
            return "PROPN"
        return "NOUN"

    @staticmethod
    def _nounish(lw: str) -> bool:
        closed = (
            DETERMINERS | PRONOUNS | POSSESSIVES | ADPOSITIONS | COORDINATORS
            | SUBORDINATORS | BE_FORMS | HAVE_DO_FORMS | MODALS | NEGATIONS
        )
        return lw not in closed and verb_lemma(lw) is None

    def _lemma(self, w: str, tag: str) -> str:
        lw = w.lower()
        if tag in ("PUNCT", "NUM"):
            return w
        if tag == "AUX":
            if lw in BE_FORMS:
                return "be"
            if lw in {"has", "had"}:
                return "have"
            if lw in {"does", "did"}:
                return "do"
            return lw
        if tag == "VERB":
            return verb_lemma(lw) or lw
        if tag in ("NOUN", "PROPN"):
            return noun_lemma(lw)
        return lw

    # ------------------------------------------------------------------
    # attachment

    def _attach(self, words, tags, lemmas):
        n = len(words)
        heads: list[int | None] = [None] * n
        labels: list[str | None] = [None] * n

        chains = self._verb_chains(tags, lemmas)
        verbs, main, passive = self._clause_verbs(chains, words, tags, lemmas, heads, labels)
        if main is None:
            main = self._nominal_root(tags)
        labels[main] = "ROOT"
        heads[main] = None

        chunks = self._chunks(tags, lemmas, heads, labels, main)
        chain_starts = {c[0] for c in chains}
        self._relate(
            words, tags, lemmas, heads, labels, chunks, verbs, main, passive, chain_starts
        )

        for i in range(n):
            if i == main:
                continue
            if labels[i] is None:
                labels[i] = "punct" if tags[i] == "PUNCT" else "dep"
            if heads[i] is None or heads[i] == i:
                heads[i] = main
        return heads, labels

    @staticmethod
    def _verb_chains(tags, lemmas) -> list[list[int]]:
        chains: list[list[int]] = []
        run: list[int] = []
        for i, tag in enumerate(tags):
            if tag in ("VERB", "AUX") or (tag in ("PART", "ADV") and run):
                run.append(i)
            else:
                if run:
                    chains.append(run)
                run = []
        if run:
            chains.append(run)
        out = []
        for run in chains:
            while run and tags[run[-1]] in ("PART", "ADV"):
                run = run[:-1]  # trailing modifiers belong to the clause, not the chain
            if any(tags[i] in ("VERB", "AUX") for i in run):
                out.append(run)
        return out

    def _clause_verbs(self, chains, words, tags, lemmas, heads, labels):
        """Label chain-internal tokens; returns (clause verbs, main, passive)."""
        verbs: list[int] = []
        main = None
        passive = False
        for chain in chains:
            chain_verbs = [i for i in chain if tags[i] == "VERB"]
            to_positions = [i for i in chain if tags[i] == "PART" and words[i].lower() == "to"]
            if chain_verbs:
                before_to = [v for v in chain_verbs if not to_positions or v < to_positions[0]]
                head_verb = before_to[-1] if before_to else chain_verbs[-1]
            else:
                head_verb = chain[-1]  # copular or bare-aux chain
            if main is None:
                main = head_verb
                passive = (
                    tags[head_verb] == "VERB"
                    and _is_participle(words[head_verb])
                    and any(lemmas[i] == "be" and tags[i] == "AUX" for i in chain)
                )
                aux_label = "auxpass" if passive else "aux"
            else:
                labels[head_verb] = "conj"
                heads[head_verb] = main
                aux_label = "aux"
            xcomp_target = None
            for i in chain:
                if i == head_verb:
                    continue
                if tags[i] == "VERB" and i > head_verb:
                    labels[i] = "xcomp"
                    heads[i] = head_verb
                    xcomp_target = i
                elif tags[i] == "AUX" or (tags[i] == "PART" and words[i].lower() == "to"):
                    labels[i] = aux_label if tags[i] == "AUX" else "aux"
                    heads[i] = i
                elif tags[i] == "PART":
                    labels[i] = "neg"
                    heads[i] = head_verb
                elif tags[i] == "ADV":
                    labels[i] = "advmod"
                    heads[i] = head_verb
            # resolve aux attachment now that any xcomp verb is known
            for i in chain:
                if labels[i] == "aux" and heads[i] == i:
                    if words[i].lower() == "to" and xcomp_target is not None:
                        heads[i] = xcomp_target
                    else:
                        heads[i] = head_verb
                elif labels[i] == "auxpass" and heads[i] == i:
                    heads[i] = head_verb
            verbs.append(head_verb)
        return verbs, main, passive

    @staticmethod
    def _nominal_root(tags) -> int:
        for pool in (NOMINAL, ("ADJ", "NUM")):
            for i, tag in enumerate(tags):
                if tag in pool:
                    return i
        for i, tag in enumerate(tags):
            if tag != "PUNCT":
                return i
        return 0

    @staticmethod
    def _chunks(tags, lemmas, heads, labels, main):
        """Group nominal runs; attach internals; return (start, end, head) list."""
        chunks = []
        n = len(tags)
        i = 0
        while i < n:
            if tags[i] not in CHUNKABLE or (labels[i] is not None and i != main):
                i += 1
                continue
            start = i
            run = [i]
            seen_nominal = tags[i] in NOMINAL
            i += 1
            while i < n and tags[i] in CHUNKABLE and (labels[i] is None or i == main):
                if tags[i] == "DET" or lemmas[i] in POSSESSIVES:
                    break  # determiners and possessives only open a chunk
                if tags[i] == "PRON" and tags[i - 1] != "DET":
                    break  # pronouns stand alone
                if tags[i] == "ADJ" and seen_nominal:
                    break  # adjectives modify only leftward within a chunk
                seen_nominal = seen_nominal or tags[i] in NOMINAL
                run.append(i)
                i += 1
            nominal = [j for j in run if tags[j] in NOMINAL]
            head = nominal[-1] if nominal else run[-1]
            for j in run:
                if j == head or j == main:
                    continue
                if tags[j] == "DET":
                    labels[j] = "det"
                elif lemmas[j] in POSSESSIVES:
                    labels[j] = "poss"
                elif tags[j] == "ADJ":
                    labels[j] = "amod"
                elif tags[j] == "NUM":
                    labels[j] = "nummod"
                elif tags[j] in ("NOUN", "PROPN") and j < head:
                    labels[j] = "compound"
                else:
                    labels[j] = "dep"
                heads[j] = head
            chunks.append((start, run[-1], head))
        return chunks

    def _relate(
        self, words, tags, lemmas, heads, labels, chunks, verbs, main, passive, chain_starts
    ):
        n = len(words)
        copular = lemmas[main] == "be" or tags[main] == "AUX"
        chunk_by_start = {c[0]: c for c in chunks}

        # subject and pre-verbal coordination
        pre = [c for c in chunks if c[1] < main and c[2] != main]
        if pre and verbs:
            subj = pre[0][2]
            labels[subj] = "nsubjpass" if passive else "nsubj"
            heads[subj] = main
            prev_head = subj
            prev_end = pre[0][1]
            for start, end, h in pre[1:]:
                for j in range(prev_end + 1, start):
                    if tags[j] == "CCONJ" and labels[j] is None:
                        labels[j] = "cc"
                        heads[j] = prev_head
                labels[h] = "conj"
                heads[h] = prev_head
                prev_head = h
                prev_end = end

        # linear pass over post-verbal material, clause by clause
        verb_set = set(verbs)
        current_verb = main
        first_obj: dict[int, int | None] = dict.fromkeys({*verbs, main})
        last_nominal: int | None = None
        pending_prep: int | None = None
        pending_cc: tuple[int, int] | None = None  # (cc index, left conjunct)
        i = min(verbs) + 1 if verbs else main + 1
        while i < n:
            if i in verb_set:
                current_verb = i
                last_nominal = None
                pending_prep = None
                pending_cc = None
                i += 1
                continue
            if labels[i] is not None and i not in chunk_by_start:
                i += 1
                continue
            tag = tags[i]
            if i in chunk_by_start:
                start, end, head = chunk_by_start[i]
                if head == main or labels[head] is not None:
                    i = end + 1
                    continue
                nominal_head = tags[head] in NOMINAL
                if pending_prep is not None:
                    labels[head] = "pobj"
                    heads[head] = pending_prep
                    pending_prep = None
                    last_nominal = head
                elif pending_cc is not None:
                    cc_i, left = pending_cc
                    labels[cc_i] = "cc"
                    heads[cc_i] = left
                    labels[head] = "conj"
                    heads[head] = left
                    pending_cc = None
                    last_nominal = head
                elif not nominal_head:
                    # bare adjective chunk: predicative complement
                    if copular:
                        labels[head] = "attr"
                        heads[head] = current_verb
                    elif first_obj[current_verb] is not None:
                        labels[head] = "oprd"
                        heads[head] = current_verb
                    else:
                        labels[head] = "acomp"
                        heads[head] = current_verb
                elif first_obj[current_verb] is None:
                    labels[head] = "attr" if copular else "dobj"
                    heads[head] = current_verb
                    first_obj[current_verb] = head
                    last_nominal = head
                elif (
                    labels[first_obj[current_verb]] == "dobj"
                    and start == _chunk_end(chunks, first_obj[current_verb]) + 1
                ):
                    labels[first_obj[current_verb]] = "dative"
                    labels[head] = "dobj"
                    heads[head] = current_verb
                    first_obj[current_verb] = head
                    last_nominal = head
                else:
                    labels[head] = "dep"
                    heads[head] = current_verb
                    last_nominal = head
                i = end + 1
                continue
            if tag == "ADP":
                if passive and lemmas[i] == "by" and current_verb == main:
                    labels[i] = "agent"
                    heads[i] = main
                else:
                    labels[i] = "prep"
                    heads[i] = last_nominal if last_nominal is not None else current_verb
                pending_prep = i
                i += 1
                continue
            if tag == "CCONJ":
                nxt = _next_content(tags, i)
                if nxt is not None and nxt in chain_starts:
                    labels[i] = "cc"
                    heads[i] = current_verb
                    pending_cc = None
                elif last_nominal is not None:
                    pending_cc = (i, last_nominal)
                else:
                    labels[i] = "cc"
                    heads[i] = current_verb
                i += 1
                continue
            if tag == "ADV":
                labels[i] = "advmod"
                heads[i] = current_verb
            elif tag == "SCONJ":
                labels[i] = "mark"
                heads[i] = current_verb
            elif tag == "PART" and words[i].lower() in NEGATIONS:
                labels[i] = "neg"
                heads[i] = current_verb
            i += 1

        # pre-verbal stragglers
        for i in range(n):
            if labels[i] is None and i != main:
                if tags[i] == "ADV":
                    labels[i] = "advmod"
                    heads[i] = main
                elif tags[i] == "SCONJ":
                    labels[i] = "mark"
                    heads[i] = main
                elif tags[i] == "ADP":
                    labels[i] = "prep"
                    heads[i] = main


def _chunk_end(chunks, head: int) -> int:
    for start, end, h in chunks:
        if h == head:
            return end
    return head


def _next_content(tags, i: int) -> int | None:
    for j in range(i + 1, len(tags)):
        if tags[j] != "PUNCT":
            return j
    return None
