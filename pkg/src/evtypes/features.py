"""Per-term feature assembly for predicate senses and object heads.

A term's content feature is the mean of its mention embeddings. Its context
feature comes from a pseudo-document: the bag-union of the mentions' masked
word lists, TF-IDF weighted over all terms of the same role, then reduced by
PCA. The two are concatenated into h = [content, context].

Predicate terms are sense ids (mentions grouped after disambiguation); object
head terms are lemmas. The two roles are vectorized and reduced independently,
so their context dimensions may differ on small corpora where the PCA rank
bound bites.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PseudoDocument:
    term: str
    bag: Counter


@dataclass(frozen=True, eq=False)
class TermFeature:
    term: str
    content: np.ndarray
    context: np.ndarray


@dataclass(frozen=True, eq=False)
class POPair:
    predicate_sense: str
    object_head: str
    frequency: int
    h_p: np.ndarray
    h_o: np.ndarray
    sentence_ids: tuple[str, ...] = ()

    def __post_init__(self):
        if self.frequency < 1:
            raise ValueError("pair frequency must be positive")
        for name, vec in (("h_p", self.h_p), ("h_o", self.h_o)):
            arr = np.asarray(vec, dtype=np.float64)
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "sentence_ids", tuple(self.sentence_ids))


def term_content_feature(mentions: Sequence) -> np.ndarray:
    if not mentions:
        raise ValueError("cannot average zero mentions")
    terms = {m.term for m in mentions}
    if len(terms) != 1:
        raise ValueError(f"mentions mix terms: {sorted(terms)}")
    return np.mean([m.embedding for m in mentions], axis=0)


def build_pseudo_document(mentions: Sequence) -> PseudoDocument:
    terms = {m.term for m in mentions}
    if len(terms) != 1:
        raise ValueError(f"mentions mix terms: {sorted(terms)}")
    bag = Counter()
    for m in mentions:
        bag.update(m.mwp)
    return PseudoDocument(term=terms.pop(), bag=bag)


def tfidf_vectorize(docs: Sequence[PseudoDocument]):
    """Rows follow input order; columns are the lexicographic vocabulary.

    Returns (matrix, vocabulary). tf is the raw bag count; idf = ln(N/df).
    """
    if len(docs) < 2:
        raise ValueError("tf-idf needs at least two pseudo-documents")
    vocabulary = sorted({w for d in docs for w in d.bag})
    df = {w: sum(1 for d in docs if w in d.bag) for w in vocabulary}
    n = len(docs)
    matrix = np.zeros((n, len(vocabulary)), dtype=np.float64)
    for i, doc in enumerate(docs):
        for j, w in enumerate(vocabulary):
            count = doc.bag.get(w, 0)
            if count:
                matrix[i, j] = count * math.log(n / df[w])
    return matrix, vocabulary


def pca_reduce(m: np.ndarray, target_dim: int) -> np.ndarray:
    """Center columns and project onto the top principal directions.

    The output width is min(target_dim, min(rows, cols) - 1): with centering,
    n points span at most n - 1 directions. Each direction's sign is fixed by
    making its largest-magnitude coordinate positive, so repeated runs (and
    different SVD backends) agree.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 2:
        raise ValueError("need a matrix with at least two rows")
    if target_dim < 1:
        raise ValueError("target_dim must be >= 1")
    centered = m - m.mean(axis=0)
    d = min(target_dim, min(m.shape) - 1)
    if d == 0:
        return np.zeros((m.shape[0], 0), dtype=np.float64)
    _, singulars, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:d]
    for j in range(d):
        peak = np.argmax(np.abs(components[j]))
        if components[j, peak] < 0:
            components[j] = -components[j]
    return centered @ components.T


def build_term_features(
    mentions_by_term: Mapping[str, Sequence], pca_dim: int
) -> dict[str, TermFeature]:
    """Content + PCA-reduced context features for one role's terms.

    Terms are processed in lexicographic order, which fixes the TF-IDF row
    order and therefore the PCA solution.
    """
    terms = sorted(mentions_by_term)
    docs = [build_pseudo_document(mentions_by_term[t]) for t in terms]
    matrix, _ = tfidf_vectorize(docs)
    reduced = pca_reduce(matrix, pca_dim)
    out = {}
    for i, term in enumerate(terms):
        out[term] = TermFeature(
            term=term,
            content=term_content_feature(mentions_by_term[term]),
            context=reduced[i],
        )
    return out


def assemble_pair_features(
    pair_counts: Mapping[tuple[str, str], int],
    pred_features: Mapping[str, TermFeature],
    obj_features: Mapping[str, TermFeature],
    pair_sentences: Mapping[tuple[str, str], Iterable[str]] | None = None,
):
    """Concatenate role features into POPair records.

    Returns (pairs, dropped): pairs ordered by frequency descending then
    lexicographic; dropped lists keys lacking a feature on either side.
    """
    pairs = []
    dropped = []
    order = sorted(pair_counts.items(), key=lambda kv: (-kv[1], kv[0]))
    for (pred, head), freq in order:
        pf = pred_features.get(pred)
        of = obj_features.get(head)
        if pf is None or of is None:
            dropped.append((pred, head))
            continue
        sids = ()
        if pair_sentences is not None:
            sids = tuple(sorted(set(pair_sentences.get((pred, head), ()))))
        pairs.append(
            POPair(
                predicate_sense=pred,
                object_head=head,
                frequency=freq,
                h_p=np.concatenate([pf.content, pf.context]),
                h_o=np.concatenate([of.content, of.context]),
                sentence_ids=sids,
            )
        )
    return pairs, dropped
