"""Line-delimited interchange formats for the feature extraction stages.

Output files are JSONL with a header record carrying the format name, schema
version, tool version, and config hash, followed by one record per line,
serialized with sorted keys and compact separators so repeated runs are
byte-identical. Dense vectors are stored as arrays of 32-bit floats and must
round-trip exactly at that precision.

Malformed input raises InputError with the offending line number.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExtractorConfig, config_hash
from .parser import Sentence, Tok

SCHEMA_VERSION = 1

VOICES = frozenset({"active", "passive"})

# ClearNLP-style dependency labels; analyses must map into this inventory.
DEP_LABELS = frozenset(
    {
        "ROOT", "acl", "acomp", "advcl", "advmod", "agent", "amod", "appos",
        "attr", "aux", "auxpass", "case", "cc", "ccomp", "compound", "conj",
        "csubj", "csubjpass", "dative", "dep", "det", "dobj", "expl", "intj",
        "mark", "meta", "neg", "nmod", "npadvmod", "nsubj", "nsubjpass",
        "nummod", "oprd", "parataxis", "pcomp", "pobj", "poss", "preconj",
        "predet", "prep", "prt", "punct", "quantmod", "relcl", "xcomp",
    }
)

POS_TAGS = frozenset(
    {
        "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
        "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SPACE", "SYM", "VERB", "X",
    }
)

OCCURRENCE_FIELDS = (
    "sentence_id",
    "predicate_index",
    "predicate_lemma",
    "voice",
    "object_head_index",
    "object_head_lemma",
)


class InputError(ValueError):
    """A file failed validation; carries path and 1-based line number."""

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {message}")


def f32(x: float) -> float:
    """Round to the nearest 32-bit float, returned as a Python float."""
    return float(np.float32(x))


def _dump(record: Mapping) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _field(record, key, path, line):
    if key not in record:
        raise InputError(path, line, f"missing field {key!r}")
    return record[key]


def _header(format_name: str, config: ExtractorConfig, **extra) -> dict:
    header = {
        "format": format_name,
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "config_hash": config_hash(config),
    }
    header.update(extra)
    return header


def _write_jsonl(path, header: Mapping, records: Iterable[Mapping]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_dump(header) + "\n")
        for record in records:
            fh.write(_dump(record) + "\n")


def _read_jsonl(path, expected_format: str):
    """Returns (header, [(line_number, record), ...])."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise InputError(path, 1, "empty file, expected a header record")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as err:
        raise InputError(path, 1, f"invalid JSON: {err.msg}") from err
    if not isinstance(header, dict) or header.get("format") != expected_format:
        raise InputError(
            path, 1, f"expected a {expected_format!r} header, got {lines[0][:80]!r}"
        )
    if header.get("schema_version") != SCHEMA_VERSION:
        raise InputError(
            path, 1, f"unsupported schema_version {header.get('schema_version')!r}"
        )
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as err:
            raise InputError(path, lineno, f"invalid JSON: {err.msg}") from err
        if not isinstance(record, dict):
            raise InputError(path, lineno, "record must be a JSON object")
        records.append((lineno, record))
    return header, records


# ---------------------------------------------------------------------------
# raw corpus (headerless JSONL: {"sentence_id"?, "text"})


def read_raw_corpus(path) -> list[tuple[str, str]]:
    """Returns (sentence_id, text) pairs; rows without an id are numbered S1..Sn."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    rows: list[tuple[str, str]] = []
    ordinal = 0
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as err:
            raise InputError(path, lineno, f"invalid JSON: {err.msg}") from err
        if not isinstance(record, dict):
            raise InputError(path, lineno, "record must be a JSON object")
        ordinal += 1
        text = _field(record, "text", path, lineno)
        if not isinstance(text, str):
            raise InputError(path, lineno, "text must be a string")
        sentence_id = record.get("sentence_id")
        if sentence_id is None:
            sentence_id = f"S{ordinal}"
        rows.append((str(sentence_id), text))
    return rows


# ---------------------------------------------------------------------------
# parsed sentences


def _sentence_to_record(s: Sentence) -> dict:
    return {
        "sentence_id": s.sentence_id,
        "text": s.text,
        "tokens": [
            {
                "index": t.index,
                "text": t.text,
                "lemma": t.lemma,
                "pos": t.pos,
                "dep_label": t.dep_label,
                "head": t.head,
            }
            for t in s.tokens
        ],
    }


def _record_to_sentence(record, path, line) -> Sentence:
    sentence_id = _field(record, "sentence_id", path, line)
    raw_tokens = _field(record, "tokens", path, line)
    if not isinstance(raw_tokens, list):
        raise InputError(path, line, "tokens must be an array")
    tokens = []
    for raw in raw_tokens:
        pos = _field(raw, "pos", path, line)
        dep = _field(raw, "dep_label", path, line)
        head = _field(raw, "head", path, line)
        index = _field(raw, "index", path, line)
        if pos not in POS_TAGS:
            raise InputError(path, line, f"unknown pos tag {pos!r}")
        if dep not in DEP_LABELS:
            raise InputError(path, line, f"unknown dependency label {dep!r}")
        if head is not None and not isinstance(head, int):
            raise InputError(path, line, "head must be an int or null")
        if not isinstance(index, int):
            raise InputError(path, line, "index must be an int")
        tokens.append(
            Tok(
                index=index,
                text=str(_field(raw, "text", path, line)),
                lemma=str(_field(raw, "lemma", path, line)),
                pos=pos,
                dep_label=dep,
                head=head,
            )
        )
    return Sentence(
        sentence_id=str(sentence_id),
        text=str(record.get("text", "")),
        tokens=tuple(tokens),
    )


def write_parses(path, sentences: Iterable[Sentence], config: ExtractorConfig) -> None:
    header = _header("parses", config, parser_model=config.parser_model)
    _write_jsonl(path, header, (_sentence_to_record(s) for s in sentences))


def read_parses(path):
    header, rows = _read_jsonl(path, "parses")
    return header, [_record_to_sentence(r, path, ln) for ln, r in rows]


# ---------------------------------------------------------------------------
# mention features


def write_mention_features(
    path,
    records: Sequence[Mapping],
    *,
    d_emb: int,
    length: int,
    config: ExtractorConfig,
) -> None:
    """Records: {mention_id, sentence_id, token_index, term, kind, embedding, mwp}.

    Every record must match the advertised embedding dimension and list
    length before anything is written.
    """
    rows = []
    for record in records:
        embedding = record["embedding"]
        mwp = list(record["mwp"])
        if len(embedding) != d_emb:
            raise ValueError(
                f"{record['mention_id']}: embedding has {len(embedding)} dims, "
                f"header advertises {d_emb}"
            )
        if len(mwp) != length:
            raise ValueError(
                f"{record['mention_id']}: mwp has {len(mwp)} entries, "
                f"header advertises {length}"
            )
        rows.append(
            {
                "mention_id": record["mention_id"],
                "sentence_id": record["sentence_id"],
                "token_index": record["token_index"],
                "term": record["term"],
                "kind": record["kind"],
                "embedding": [f32(v) for v in embedding],
                "mwp": mwp,
            }
        )
    header = _header(
        "mention_features", config, mlm_model=config.mlm_model, d_emb=d_emb, l=length
    )
    _write_jsonl(path, header, rows)


def read_mention_header(path) -> dict:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise InputError(path, 1, "empty file, expected a header record")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as err:
        raise InputError(path, 1, f"invalid JSON: {err.msg}") from err
    if not isinstance(header, dict) or header.get("format") != "mention_features":
        raise InputError(path, 1, "expected a 'mention_features' header")
    return header


# ---------------------------------------------------------------------------
# predicate-object occurrences (produced by the downstream pipeline)


def read_occurrences(path) -> list[dict]:
    _, rows = _read_jsonl(path, "po_occurrences")
    out = []
    for lineno, record in rows:
        for key in OCCURRENCE_FIELDS:
            _field(record, key, path, lineno)
        if record["voice"] not in VOICES:
            raise InputError(path, lineno, f"unknown voice {record['voice']!r}")
        for key in ("predicate_index", "object_head_index"):
            if not isinstance(record[key], int):
                raise InputError(path, lineno, f"{key} must be an int")
        out.append({key: record[key] for key in OCCURRENCE_FIELDS})
    return out


# ---------------------------------------------------------------------------
# sense dictionary


def load_sense_dictionary(path) -> dict:
    """Returns {lemma: [{sense_id, definition?, examples: [{target_index?, text}]}]}."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise InputError(path, err.lineno, f"invalid JSON: {err.msg}") from err
    if not isinstance(raw, dict):
        raise InputError(path, None, "sense dictionary must be a JSON object")
    for lemma, senses in raw.items():
        if not isinstance(senses, list):
            raise InputError(path, None, f"senses for {lemma!r} must be an array")
        for sense in senses:
            if not isinstance(sense, dict) or "sense_id" not in sense:
                raise InputError(path, None, f"sense under {lemma!r} lacks a sense_id")
            examples = sense.get("examples", [])
            if not isinstance(examples, list):
                raise InputError(
                    path, None, f"examples of {sense['sense_id']!r} must be an array"
                )
            for example in examples:
                if not isinstance(example, dict) or "text" not in example:
                    raise InputError(
                        path, None, f"example of {sense['sense_id']!r} lacks text"
                    )
    return raw
