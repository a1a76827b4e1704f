"""Feature assembly: targets, contextual embeddings, masked-word predictions.

Batching here is purely a throughput knob: outputs are always in input order
and identical for every batch size. Records carry the mention identifier
scheme the downstream pipeline joins on ("{sentence_id}:t{token_index}" for
corpus mentions, "{sense_id}#ex{k}" for dictionary examples).
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .formats import InputError
from .parser import Sentence

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Target:
    sentence_id: str
    token_index: int
    kind: str  # "predicate" | "object_head"
    term: str
    pos: str


def whole_word(word: str) -> bool:
    """True for an ASCII alphabetic surface word (no sub-word pieces)."""
    return bool(word) and word.isascii() and word.isalpha() and not word.startswith("##")


def finalize_predictions(
    raw: Iterable[str], length: int, reserve: Sequence[str]
) -> list[str]:
    """Lowercased, deduplicated whole words, backfilled from reserve to length."""
    out: list[str] = []
    seen: set[str] = set()
    for word in raw:
        if not whole_word(word):
            continue
        lowered = word.lower()
        if lowered in seen:
            continue
        seen.add(lowered)
        out.append(lowered)
        if len(out) == length:
            return out
    for word in reserve:
        lowered = word.lower()
        if lowered in seen:
            continue
        seen.add(lowered)
        out.append(lowered)
        if len(out) == length:
            return out
    raise ValueError(
        f"cannot assemble {length} distinct predictions; got {len(out)}"
    )


def _batched(items: Sequence, batch_size: int):
    for start in range(0, len(items), batch_size):
        yield items[start : start + batch_size]


# ---------------------------------------------------------------------------
# corpus parsing


def parse_corpus(rows: Iterable[tuple[str, str]], parser):
    """Parse (sentence_id, text) rows; unparseable rows are skipped with a warning."""
    sentences: list[Sentence] = []
    skipped: list[str] = []
    for sentence_id, text in rows:
        tokens = parser.parse(text)
        if tokens is None:
            skipped.append(sentence_id)
            log.warning("skipping unparseable sentence %s: %r", sentence_id, text[:60])
            continue
        sentences.append(
            Sentence(sentence_id=sentence_id, text=text, tokens=tuple(tokens))
        )
    return sentences, skipped


# ---------------------------------------------------------------------------
# corpus mention targets


def collect_targets(
    sentences_by_id: Mapping[str, Sentence], occurrences: Iterable[Mapping]
) -> list[Target]:
    """Predicate and object-head targets, deduplicated in first-seen order.

    Terms come from the parse tokens, the authoritative lemma source, so
    they agree with what the occurrence extractor derived from the same
    parses.
    """
    targets: list[Target] = []
    seen: set[tuple[str, int, str]] = set()
    for occurrence in occurrences:
        sentence_id = occurrence["sentence_id"]
        sentence = sentences_by_id.get(sentence_id)
        if sentence is None:
            raise InputError(
                "<occurrences>", None, f"unknown sentence_id {sentence_id!r}"
            )
        for kind, index_key in (
            ("predicate", "predicate_index"),
            ("object_head", "object_head_index"),
        ):
            index = occurrence[index_key]
            if not 0 <= index < len(sentence.tokens):
                raise InputError(
                    "<occurrences>",
                    None,
                    f"{index_key} {index} out of range for sentence "
                    f"{sentence_id!r} with {len(sentence.tokens)} tokens",
                )
            key = (sentence_id, index, kind)
            if key in seen:
                continue
            seen.add(key)
            token = sentence.tokens[index]
            targets.append(
                Target(
                    sentence_id=sentence_id,
                    token_index=index,
                    kind=kind,
                    term=token.lemma,
                    pos=token.pos,
                )
            )
    return targets


# ---------------------------------------------------------------------------
# batched inference


def embed_mentions(
    sentences_by_id: Mapping[str, Sentence],
    targets: Sequence[Target],
    encoder,
    batch_size: int = 8,
) -> list[np.ndarray]:
    items = [
        ([t.text for t in sentences_by_id[target.sentence_id].tokens], target.token_index)
        for target in targets
    ]
    out: list[np.ndarray] = []
    for chunk in _batched(items, batch_size):
        out.extend(encoder.embed_batch(chunk))
    return out


def masked_predictions(
    sentences_by_id: Mapping[str, Sentence],
    targets: Sequence[Target],
    encoder,
    length: int,
    batch_size: int = 8,
) -> list[list[str]]:
    items = [
        (
            [t.text for t in sentences_by_id[target.sentence_id].tokens],
            target.token_index,
            target.pos,
        )
        for target in targets
    ]
    out: list[list[str]] = []
    for chunk in _batched(items, batch_size):
        out.extend(encoder.predict_batch(chunk, length=length))
    return out


def build_mention_records(
    sentences_by_id: Mapping[str, Sentence],
    targets: Sequence[Target],
    encoder,
    length: int,
    batch_size: int = 8,
) -> list[dict]:
    embeddings = embed_mentions(sentences_by_id, targets, encoder, batch_size=batch_size)
    predictions = masked_predictions(
        sentences_by_id, targets, encoder, length=length, batch_size=batch_size
    )
    return [
        {
            "mention_id": f"{target.sentence_id}:t{target.token_index}",
            "sentence_id": target.sentence_id,
            "token_index": target.token_index,
            "term": target.term,
            "kind": target.kind,
            "embedding": embedding,
            "mwp": mwp,
        }
        for target, embedding, mwp in zip(targets, embeddings, predictions)
    ]


# ---------------------------------------------------------------------------
# sense dictionary examples


def featurize_sense_dictionary(
    dictionary: Mapping[str, Sequence[Mapping]],
    parser,
    encoder,
    length: int,
    batch_size: int = 8,
):
    """Feature records for every dictionary example sentence.

    The example's target index is trusted only if the token there carries the
    entry's lemma; otherwise the first token with that lemma is used. Examples
    whose sentence cannot be parsed or does not contain the lemma at all are
    skipped and reported, never silently dropped.
    """
    pending: list[tuple[str, str, list[str], int, str]] = []
    skipped: list[str] = []
    for lemma, senses in dictionary.items():
        for sense in senses:
            sense_id = sense["sense_id"]
            for k, example in enumerate(sense.get("examples", [])):
                mention_id = f"{sense_id}#ex{k}"
                tokens = parser.parse(example["text"])
                if tokens is None:
                    skipped.append(mention_id)
                    log.warning(
                        "skipping sense example %s: unparseable text", mention_id
                    )
                    continue
                index = example.get("target_index")
                if not (
                    isinstance(index, int)
                    and 0 <= index < len(tokens)
                    and tokens[index].lemma == lemma
                ):
                    index = next(
                        (t.index for t in tokens if t.lemma == lemma), None
                    )
                if index is None:
                    skipped.append(mention_id)
                    log.warning(
                        "skipping sense example %s: lemma %r not found in %r",
                        mention_id,
                        lemma,
                        example["text"][:60],
                    )
                    continue
                words = [t.text for t in tokens]
                pending.append((mention_id, lemma, words, index, tokens[index].pos))

    embeddings: list[np.ndarray] = []
    for chunk in _batched([(words, idx) for _, _, words, idx, _ in pending], batch_size):
        embeddings.extend(encoder.embed_batch(chunk))
    predictions: list[list[str]] = []
    for chunk in _batched(
        [(words, idx, pos) for _, _, words, idx, pos in pending], batch_size
    ):
        predictions.extend(encoder.predict_batch(chunk, length=length))

    records = [
        {
            "mention_id": mention_id,
            "sentence_id": mention_id,
            "token_index": index,
            "term": lemma,
            "kind": "sense_example",
            "embedding": embedding,
            "mwp": mwp,
        }
        for (mention_id, lemma, _, index, _), embedding, mwp in zip(
            pending, embeddings, predictions
        )
    ]
    return records, skipped
