"""Verb sense disambiguation against a dictionary of example sentences.

Each candidate sense is summarized by a profile: the mean contextual embedding
of its example sentences plus one ranked word list obtained by aggregating the
examples' masked-word-prediction lists under mean reciprocal rank. A mention is
assigned the sense maximizing cos(embedding, profile) * rbo(mwp, profile).

The overlap score is rank-biased overlap, truncated at `depth` and normalized
by (1 - p^depth) so identical lists score exactly 1. Negative cosines are kept
as-is; the product may go negative but the argmax stays well-defined.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

DEFAULT_MWP_LENGTH = 10
DEFAULT_RBO_P = 0.9

MENTION_KINDS = ("predicate", "object_head", "sense_example")


@dataclass(frozen=True, eq=False)
class MentionFeature:
    """One term occurrence: contextual embedding plus masked-prediction list."""

    mention_id: str
    term: str
    kind: str
    embedding: np.ndarray
    mwp: tuple[str, ...]
    sentence_id: str = ""
    token_index: int = -1

    def __post_init__(self):
        if self.kind not in MENTION_KINDS:
            raise ValueError(f"unknown mention kind {self.kind!r}")
        emb = np.asarray(self.embedding, dtype=np.float64)
        if emb.ndim != 1 or not np.all(np.isfinite(emb)):
            raise ValueError(f"{self.mention_id}: embedding must be a finite vector")
        object.__setattr__(self, "embedding", emb)
        if len(set(self.mwp)) != len(self.mwp):
            raise ValueError(f"{self.mention_id}: mwp entries must be distinct")


@dataclass(frozen=True)
class SenseExample:
    text: str
    target_index: int


@dataclass(frozen=True)
class SenseEntry:
    lemma: str
    sense_id: str
    definition: str
    examples: tuple[SenseExample, ...]

    def __post_init__(self):
        if not self.examples:
            raise ValueError(f"sense {self.sense_id} has no example sentences")


@dataclass(frozen=True, eq=False)
class SenseProfile:
    lemma: str
    sense_id: str
    mean_embedding: np.ndarray
    aggregated_mwp: tuple[str, ...]


def example_mention_id(sense_id: str, k: int) -> str:
    """Identifier under which sense example k's features are filed."""
    return f"{sense_id}#ex{k}"


def catch_all_sense(lemma: str) -> str:
    return f"{lemma}_0"


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    denom = np.linalg.norm(u) * np.linalg.norm(v)
    if denom == 0.0:
        return float("nan")
    return float(np.dot(u, v) / denom)


def aggregate_ranked_lists_mrr(
    lists: Sequence[Sequence[str]], limit: int = DEFAULT_MWP_LENGTH
) -> tuple[str, ...]:
    """Fuse ranked lists by mean reciprocal rank (absent counts as zero).

    Scores are exact rationals so that ties depend only on the rank multiset,
    not on float accumulation order across lists.
    """
    if not lists:
        raise ValueError("need at least one ranked list")
    scores: dict[str, Fraction] = {}
    for lst in lists:
        if len(set(lst)) != len(lst):
            raise ValueError("ranked lists must have distinct entries")
        for rank, word in enumerate(lst, start=1):
            scores[word] = scores.get(word, Fraction(0)) + Fraction(1, rank)
    ordered = sorted(scores, key=lambda w: (-scores[w], w))
    return tuple(ordered[:limit])


def rbo(
    a: Sequence[str],
    b: Sequence[str],
    p: float = DEFAULT_RBO_P,
    depth: int = DEFAULT_MWP_LENGTH,
) -> float:
    """Truncated rank-biased overlap at a fixed depth.

    Normalized so identical lists of length >= depth score exactly 1: the
    normalizer is the weight sum accumulated the same way as the numerator
    (its closed form is (1 - p^depth) / (1 - p), but the closed form would
    leave identical lists a few ulps shy of 1). Lists shorter than depth
    simply stop contributing new overlap; the normalizer stays fixed, which
    keeps the score monotone when agreeing elements are appended to both
    lists.
    """
    if not a or not b:
        raise ValueError("rbo is undefined for empty lists")
    if not 0.0 < p < 1.0:
        raise ValueError("persistence p must lie in (0, 1)")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if len(set(a)) != len(a) or len(set(b)) != len(b):
        raise ValueError("ranked lists must have distinct entries")
    seen_a: set[str] = set()
    seen_b: set[str] = set()
    overlap = 0
    total = 0.0
    norm = 0.0
    for d in range(1, depth + 1):
        if d <= len(a):
            word = a[d - 1]
            if word in seen_b:
                overlap += 1
            seen_a.add(word)
        if d <= len(b):
            word = b[d - 1]
            if word in seen_a:
                overlap += 1
            seen_b.add(word)
        weight = p ** (d - 1)
        total += weight * (overlap / d)
        norm += weight
    return total / norm


def build_sense_profiles(
    entries: Iterable[SenseEntry],
    example_features: Mapping[str, MentionFeature],
    limit: int = DEFAULT_MWP_LENGTH,
) -> tuple[list[SenseProfile], list[str]]:
    """Profile each sense from its example features.

    Returns (profiles, skipped) where skipped lists sense ids for which no
    example had a feature record.
    """
    profiles = []
    skipped = []
    for entry in entries:
        feats = []
        for k in range(len(entry.examples)):
            feat = example_features.get(example_mention_id(entry.sense_id, k))
            if feat is not None:
                feats.append(feat)
        if not feats:
            skipped.append(entry.sense_id)
            continue
        mean_emb = np.mean([f.embedding for f in feats], axis=0)
        agg = aggregate_ranked_lists_mrr([f.mwp for f in feats], limit=limit)
        profiles.append(
            SenseProfile(
                lemma=entry.lemma,
                sense_id=entry.sense_id,
                mean_embedding=mean_emb,
                aggregated_mwp=agg,
            )
        )
    return profiles, skipped


def score_senses(
    mention: MentionFeature,
    profiles: Sequence[SenseProfile],
    p: float = DEFAULT_RBO_P,
    depth: int = DEFAULT_MWP_LENGTH,
) -> list[tuple[str, float]]:
    """Fused score for every candidate sense, best first.

    Ordering key is (score descending, sense_id), matching disambiguate's
    tie-break. Non-finite scores sort last.
    """
    if not profiles:
        raise ValueError("no candidate senses")
    for prof in profiles:
        if prof.lemma != mention.term:
            raise ValueError(
                f"profile {prof.sense_id} is for {prof.lemma!r}, "
                f"mention is {mention.term!r}"
            )
    scored = []
    for prof in profiles:
        c = cosine(mention.embedding, prof.mean_embedding)
        sim = rbo(mention.mwp, prof.aggregated_mwp, p=p, depth=depth)
        scored.append((prof.sense_id, c * sim))
    scored.sort(key=lambda t: (not math.isfinite(t[1]), -t[1] if math.isfinite(t[1]) else 0.0, t[0]))
    return scored


def disambiguate(
    mention: MentionFeature,
    profiles: Sequence[SenseProfile],
    p: float = DEFAULT_RBO_P,
    depth: int = DEFAULT_MWP_LENGTH,
) -> str:
    scored = score_senses(mention, profiles, p=p, depth=depth)
    best_id, best_score = scored[0]
    if not math.isfinite(best_score):
        raise ValueError(f"{mention.mention_id}: all sense scores are non-finite")
    return best_id


# ---------------------------------------------------------------------------
# dictionary file


def load_sense_dictionary(path: str | Path) -> dict[str, list[SenseEntry]]:
    """Read {lemma: [{sense_id, definition, examples: [{text, target_index}]}]}."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: top level must be an object keyed by lemma")
    out: dict[str, list[SenseEntry]] = {}
    for lemma, senses in raw.items():
        entries = []
        for sense in senses:
            examples = tuple(
                SenseExample(text=ex["text"], target_index=int(ex["target_index"]))
                for ex in sense["examples"]
            )
            entries.append(
                SenseEntry(
                    lemma=lemma,
                    sense_id=sense["sense_id"],
                    definition=sense.get("definition", ""),
                    examples=examples,
                )
            )
        ids = [e.sense_id for e in entries]
        if len(set(ids)) != len(ids):
            raise ValueError(f"{path}: duplicate sense ids under {lemma!r}")
        out[lemma] = entries
    return out
