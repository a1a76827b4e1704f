"""Line-delimited interchange formats shared by the pipeline stages.

Every JSONL file starts with a header record carrying the format name, schema
version, tool version, config hash, and seed, plus format-specific fields
(embedding dimension, list length). TSV files carry the same metadata as
"# key=value" comment lines. Dense vectors are serialized as arrays of 32-bit
floats and must round-trip exactly at that precision; readers reject values
that do not.

Malformed input raises InputFormatError with the offending line number.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path

import numpy as np

from . import __version__
from .extraction import ParsedSentence, POOccurrence, Token, Voice
from .senses import MentionFeature

SCHEMA_VERSION = 1

# ClearNLP-style dependency labels; parsers targeting this pipeline must map
# into this inventory. Labels outside the extraction rule sets are legal and
# simply never match a rule.
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


class InputFormatError(ValueError):
    """A file failed validation; carries path and 1-based line number."""

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {message}")


def f32(x: float) -> float:
    """Round to the nearest 32-bit float, returned as a Python float."""
    return float(np.float32(x))


def f32_vector(values: Iterable[float]) -> list[float]:
    return [f32(v) for v in values]


def _check_f32_exact(values, path, line, name):
    for v in values:
        if not isinstance(v, (int, float)) or f32(v) != v:
            raise InputFormatError(
                path, line, f"{name} value {v!r} is not an exact 32-bit float"
            )


def _dump(record: Mapping) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


# ---------------------------------------------------------------------------
# generic JSONL with header line


def write_jsonl(path, format_name: str, records: Iterable[Mapping], meta: Mapping):
    header = {
        "format": format_name,
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "config_hash": meta.get("config_hash", ""),
        "seed": meta.get("seed"),
    }
    for key, value in meta.items():
        if key not in ("config_hash", "seed"):
            header[key] = value
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_dump(header) + "\n")
        for record in records:
            fh.write(_dump(record) + "\n")


def read_jsonl(path, expected_format: str):
    """Returns (header, [(line_number, record), ...])."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise InputFormatError(path, 1, "empty file, expected a header record")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as err:
        raise InputFormatError(path, 1, f"invalid JSON: {err.msg}") from err
    if not isinstance(header, dict) or header.get("format") != expected_format:
        raise InputFormatError(
            path, 1, f"expected a {expected_format!r} header, got {lines[0][:80]!r}"
        )
    if header.get("schema_version") != SCHEMA_VERSION:
        raise InputFormatError(
            path, 1, f"unsupported schema_version {header.get('schema_version')!r}"
        )
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as err:
            raise InputFormatError(path, lineno, f"invalid JSON: {err.msg}") from err
        if not isinstance(record, dict):
            raise InputFormatError(path, lineno, "record must be a JSON object")
        records.append((lineno, record))
    return header, records


def _field(record, key, path, line):
    if key not in record:
        raise InputFormatError(path, line, f"missing field {key!r}")
    return record[key]


# ---------------------------------------------------------------------------
# parsed sentences


def sentence_to_record(s: ParsedSentence) -> dict:
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


def record_to_sentence(record, path="<memory>", line=None) -> ParsedSentence:
    sentence_id = _field(record, "sentence_id", path, line)
    raw_tokens = _field(record, "tokens", path, line)
    tokens = []
    for raw in raw_tokens:
        pos = _field(raw, "pos", path, line)
        dep = _field(raw, "dep_label", path, line)
        head = _field(raw, "head", path, line)
        if pos not in POS_TAGS:
            raise InputFormatError(path, line, f"unknown pos tag {pos!r}")
        if dep not in DEP_LABELS:
            raise InputFormatError(path, line, f"unknown dependency label {dep!r}")
        if head is not None and not isinstance(head, int):
            raise InputFormatError(path, line, "head must be an int or null")
        tokens.append(
            Token(
                index=_field(raw, "index", path, line),
                text=_field(raw, "text", path, line),
                lemma=_field(raw, "lemma", path, line),
                pos=pos,
                dep_label=dep,
                head=head,
            )
        )
    try:
        return ParsedSentence(
            sentence_id=sentence_id,
            tokens=tuple(tokens),
            text=record.get("text", ""),
        )
    except ValueError as err:
        raise InputFormatError(path, line, str(err)) from err


def write_parses(path, sentences: Iterable[ParsedSentence], meta: Mapping):
    write_jsonl(path, "parses", (sentence_to_record(s) for s in sentences), meta)


def read_parses(path):
    header, rows = read_jsonl(path, "parses")
    return header, [record_to_sentence(r, path, ln) for ln, r in rows]


# ---------------------------------------------------------------------------
# P-O occurrences


def occurrence_to_record(o: POOccurrence) -> dict:
    return {
        "sentence_id": o.sentence_id,
        "predicate_index": o.predicate_index,
        "predicate_lemma": o.predicate_lemma,
        "voice": o.voice.value,
        "object_head_index": o.object_head_index,
        "object_head_lemma": o.object_head_lemma,
    }


def record_to_occurrence(record, path="<memory>", line=None) -> POOccurrence:
    raw_voice = _field(record, "voice", path, line)
    try:
        voice = Voice(raw_voice)
    except ValueError as err:
        raise InputFormatError(path, line, f"unknown voice {raw_voice!r}") from err
    try:
        return POOccurrence(
            sentence_id=_field(record, "sentence_id", path, line),
            predicate_index=_field(record, "predicate_index", path, line),
            predicate_lemma=_field(record, "predicate_lemma", path, line),
            voice=voice,
            object_head_index=_field(record, "object_head_index", path, line),
            object_head_lemma=_field(record, "object_head_lemma", path, line),
        )
    except ValueError as err:
        raise InputFormatError(path, line, str(err)) from err


def write_occurrences(path, occurrences: Iterable[POOccurrence], meta: Mapping):
    write_jsonl(
        path, "po_occurrences", (occurrence_to_record(o) for o in occurrences), meta
    )


def read_occurrences(path):
    header, rows = read_jsonl(path, "po_occurrences")
    return header, [record_to_occurrence(r, path, ln) for ln, r in rows]


# ---------------------------------------------------------------------------
# mention features


def mention_to_record(m: MentionFeature) -> dict:
    return {
        "mention_id": m.mention_id,
        "sentence_id": m.sentence_id,
        "token_index": m.token_index,
        "term": m.term,
        "kind": m.kind,
        "embedding": f32_vector(m.embedding),
        "mwp": list(m.mwp),
    }


def record_to_mention(record, path="<memory>", line=None, d_emb=None, l=None):
    embedding = _field(record, "embedding", path, line)
    mwp = _field(record, "mwp", path, line)
    _check_f32_exact(embedding, path, line, "embedding")
    if d_emb is not None and len(embedding) != d_emb:
        raise InputFormatError(
            path, line, f"embedding has {len(embedding)} dims, header says {d_emb}"
        )
    if l is not None and len(mwp) != l:
        raise InputFormatError(
            path, line, f"mwp has {len(mwp)} entries, header says {l}"
        )
    try:
        return MentionFeature(
            mention_id=_field(record, "mention_id", path, line),
            term=_field(record, "term", path, line),
            kind=_field(record, "kind", path, line),
            embedding=np.asarray(embedding, dtype=np.float64),
            mwp=tuple(mwp),
            sentence_id=record.get("sentence_id", ""),
            token_index=record.get("token_index", -1),
        )
    except ValueError as err:
        raise InputFormatError(path, line, str(err)) from err


def write_mention_features(path, mentions: Sequence[MentionFeature], meta: Mapping):
    """Header records d_emb and l; every record must conform before writing."""
    meta = dict(meta)
    if "d_emb" not in meta:
        if not mentions:
            raise ValueError("cannot infer d_emb from an empty mention list")
        meta["d_emb"] = int(len(mentions[0].embedding))
    if "l" not in meta:
        if not mentions:
            raise ValueError("cannot infer l from an empty mention list")
        meta["l"] = len(mentions[0].mwp)
    for m in mentions:
        if len(m.embedding) != meta["d_emb"]:
            raise ValueError(f"{m.mention_id}: embedding dim != {meta['d_emb']}")
        if len(m.mwp) != meta["l"]:
            raise ValueError(f"{m.mention_id}: mwp length != {meta['l']}")
    write_jsonl(
        path, "mention_features", (mention_to_record(m) for m in mentions), meta
    )


def read_mention_features(path):
    header, rows = read_jsonl(path, "mention_features")
    d_emb = header.get("d_emb")
    l = header.get("l")
    mentions = [record_to_mention(r, path, ln, d_emb=d_emb, l=l) for ln, r in rows]
    return header, mentions


# ---------------------------------------------------------------------------
# sense assignments


def write_sense_assignments(path, assignments: Iterable[Mapping], meta: Mapping):
    """Records: {mention_id, lemma, sense_id, score}."""
    write_jsonl(path, "sense_assignments", assignments, meta)


def read_sense_assignments(path):
    header, rows = read_jsonl(path, "sense_assignments")
    out = []
    for ln, record in rows:
        for key in ("mention_id", "lemma", "sense_id", "score"):
            _field(record, key, path, ln)
        out.append(record)
    return header, out


# ---------------------------------------------------------------------------
# pair features (input to the latent clustering stage)


def pair_to_record(pair) -> dict:
    return {
        "predicate_sense": pair.predicate_sense,
        "object_head": pair.object_head,
        "frequency": pair.frequency,
        "h_p": f32_vector(pair.h_p),
        "h_o": f32_vector(pair.h_o),
        "sentence_ids": list(pair.sentence_ids),
    }


def record_to_pair(record, path="<memory>", line=None, dim_p=None, dim_o=None):
    from .features import POPair

    h_p = _field(record, "h_p", path, line)
    h_o = _field(record, "h_o", path, line)
    _check_f32_exact(h_p, path, line, "h_p")
    _check_f32_exact(h_o, path, line, "h_o")
    if dim_p is not None and len(h_p) != dim_p:
        raise InputFormatError(path, line, f"h_p has {len(h_p)} dims, header says {dim_p}")
    if dim_o is not None and len(h_o) != dim_o:
        raise InputFormatError(path, line, f"h_o has {len(h_o)} dims, header says {dim_o}")
    try:
        return POPair(
            predicate_sense=_field(record, "predicate_sense", path, line),
            object_head=_field(record, "object_head", path, line),
            frequency=_field(record, "frequency", path, line),
            h_p=np.asarray(h_p, dtype=np.float64),
            h_o=np.asarray(h_o, dtype=np.float64),
            sentence_ids=tuple(record.get("sentence_ids", ())),
        )
    except ValueError as err:
        raise InputFormatError(path, line, str(err)) from err


def write_pair_features(path, pairs, meta: Mapping):
    meta = dict(meta)
    if pairs:
        meta.setdefault("dim_p", int(len(pairs[0].h_p)))
        meta.setdefault("dim_o", int(len(pairs[0].h_o)))
    write_jsonl(path, "pair_features", (pair_to_record(p) for p in pairs), meta)


def read_pair_features(path):
    header, rows = read_jsonl(path, "pair_features")
    dim_p = header.get("dim_p")
    dim_o = header.get("dim_o")
    pairs = [record_to_pair(r, path, ln, dim_p=dim_p, dim_o=dim_o) for ln, r in rows]
    return header, pairs


# ---------------------------------------------------------------------------
# TSV pair-frequency table


def write_pair_table(path, counts: Mapping, meta: Mapping):
    """Rows: predicate \t object_head \t count, most frequent first."""
    rows = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# format=pair_freq schema_version={SCHEMA_VERSION}\n")
        fh.write(f"# tool_version={__version__}\n")
        fh.write(f"# config_hash={meta.get('config_hash', '')}\n")
        fh.write(f"# seed={meta.get('seed')}\n")
        for (pred, head), count in rows:
            fh.write(f"{pred}\t{head}\t{count}\n")


def read_pair_table(path):
    counts = {}
    for lineno, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise InputFormatError(path, lineno, "expected pred\\thead\\tcount")
        try:
            count = int(parts[2])
        except ValueError as err:
            raise InputFormatError(path, lineno, f"bad count {parts[2]!r}") from err
        if count < 0:
            raise InputFormatError(path, lineno, "count must be non-negative")
        counts[(parts[0], parts[1])] = count
    return counts


# ---------------------------------------------------------------------------
# label files and reports


def read_labels(path):
    """One integer per line, or a JSON object {id: label} ordered by id."""
    text = Path(path).read_text(encoding="utf-8").strip()
    if not text:
        return []
    if text.lstrip().startswith("{"):
        mapping = json.loads(text)
        return [int(mapping[k]) for k in sorted(mapping)]
    labels = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            labels.append(int(line.strip()))
        except ValueError as err:
            raise InputFormatError(path, lineno, f"bad label {line.strip()!r}") from err
    return labels


def write_json_report(path, payload: Mapping):
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def read_json_report(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))
