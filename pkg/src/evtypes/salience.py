"""Corpus-vs-background salience scoring for predicate lemmas and object heads.

A word scores high when it is frequent in the target corpus but appears in few
background sentences: score = (1 + ln(freq)^2) * ln(n_bs / bsf). Words missing
from the background statistics get bsf smoothed to 1 so that domain-specific
terms are rewarded rather than crashing the ratio.

The top fraction is taken by rank position (ceil(keep_fraction * vocab)), and
predicate and object-head vocabularies are scored and cut independently.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class BackgroundStats:
    """Sentence frequencies of words in a large generic background corpus."""

    n_bs: int
    bsf: Mapping[str, int]

    def __post_init__(self):
        if self.n_bs < 1:
            raise ValueError("background corpus must contain at least one sentence")
        for word, count in self.bsf.items():
            if not 1 <= count <= self.n_bs:
                raise ValueError(
                    f"background frequency of {word!r} must lie in [1, {self.n_bs}]"
                )

    def frequency(self, word: str) -> int:
        # unseen words are treated as occurring in a single background sentence
        return self.bsf.get(word, 1)


@dataclass(frozen=True)
class SalienceTable:
    """Words with corpus frequency and salience score, best first."""

    entries: tuple[tuple[str, int, float], ...]

    def __post_init__(self):
        scores = [score for _, _, score in self.entries]
        if any(not math.isfinite(s) for s in scores):
            raise ValueError("salience scores must be finite")
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise ValueError("entries must be sorted by score descending")

    def __len__(self) -> int:
        return len(self.entries)

    def score_of(self, word: str) -> float:
        for w, _, score in self.entries:
            if w == word:
                return score
        raise KeyError(word)


def compute_salience(freq: int, bsf: int, n_bs: int) -> float:
    if freq < 1:
        raise ValueError("corpus frequency must be >= 1")
    if not 1 <= bsf <= n_bs:
        raise ValueError("background frequency must lie in [1, n_bs]")
    return (1.0 + math.log(freq) ** 2) * math.log(n_bs / bsf)


def build_salience_table(
    corpus_counts: Mapping[str, int], bg: BackgroundStats
) -> SalienceTable:
    if not corpus_counts:
        raise ValueError("corpus counts must not be empty")
    rows = []
    for word, freq in corpus_counts.items():
        score = compute_salience(freq, bg.frequency(word), bg.n_bs)
        rows.append((word, freq, score))
    rows.sort(key=lambda r: (-r[2], r[0]))
    return SalienceTable(entries=tuple(rows))


def select_salient(table: SalienceTable, keep_fraction: float) -> set[str]:
    if not 0.0 < keep_fraction <= 1.0:
        raise ValueError("keep_fraction must lie in (0, 1]")
    keep = math.ceil(keep_fraction * len(table))
    return {word for word, _, _ in table.entries[:keep]}


def filter_occurrences(occurrences, salient_predicates, salient_heads):
    """Keep occurrences whose predicate lemma and head lemma are both salient."""
    return [
        occ
        for occ in occurrences
        if occ.predicate_lemma in salient_predicates
        and occ.object_head_lemma in salient_heads
    ]


# ---------------------------------------------------------------------------
# file formats


def load_background_stats(path: str | Path) -> BackgroundStats:
    """Read a stats file: "N_BS=<int>" line, then word<TAB>frequency rows."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("N_BS="):
        raise ValueError(f"{path}: first line must be N_BS=<int>")
    n_bs = int(lines[0][len("N_BS=") :])
    bsf = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            word, count = line.split("\t")
            bsf[word] = int(count)
        except ValueError as err:
            raise ValueError(f"{path}:{lineno}: expected word<TAB>int") from err
    return BackgroundStats(n_bs=n_bs, bsf=bsf)


def write_salience_table(
    table: SalienceTable, path: str | Path, meta: Mapping | None = None
) -> None:
    """Rows word<TAB>freq<TAB>score, best first, after # key=value comments."""
    from . import __version__

    meta = dict(meta or {})
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# format=salience_table schema_version=1\n")
        fh.write(f"# tool_version={__version__}\n")
        fh.write(f"# config_hash={meta.get('config_hash', '')}\n")
        fh.write(f"# seed={meta.get('seed')}\n")
        for word, freq, score in table.entries:
            fh.write(f"{word}\t{freq}\t{score:.10g}\n")


def read_salient_words(path: str | Path) -> list[str]:
    """Words of a written salience table, preserving rank order."""
    words = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip() and not line.startswith("#"):
            words.append(line.split("\t")[0])
    return words
