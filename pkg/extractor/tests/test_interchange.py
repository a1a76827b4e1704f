"""File formats: headers, 32-bit float round trips, line-numbered errors."""

import json

import numpy as np
import pytest

from evfeats import __version__
from evfeats.config import ExtractorConfig, config_hash
from evfeats.formats import (
    InputError,
    read_mention_header,
    read_occurrences,
    read_parses,
    read_raw_corpus,
    write_mention_features,
    write_parses,
)
from evfeats.features import parse_corpus
from evfeats.parser import RuleParser


@pytest.fixture()
def sentences():
    parsed, _ = parse_corpus([("F1", "The lion seized the mouse.")], RuleParser())
    return parsed


def test_raw_corpus_reader(data_dir):
    rows = read_raw_corpus(data_dir / "corpus.jsonl")
    assert [sid for sid, _ in rows] == ["F1", "F2", "F3", "F4", "F5"]
    assert rows[0][1] == "The lion seized the mouse."


def test_raw_corpus_autonumbers_missing_ids(tmp_path):
    path = tmp_path / "raw.jsonl"
    path.write_text('{"text": "A wolf ran."}\n{"text": "A fox ran."}\n', encoding="utf-8")
    rows = read_raw_corpus(path)
    assert [sid for sid, _ in rows] == ["S1", "S2"]


def test_raw_corpus_empty_file_is_empty(tmp_path):
    path = tmp_path / "raw.jsonl"
    path.write_text("", encoding="utf-8")
    assert read_raw_corpus(path) == []


def test_raw_corpus_malformed_line_carries_line_number(tmp_path):
    path = tmp_path / "raw.jsonl"
    path.write_text('{"text": "ok"}\n{oops\n', encoding="utf-8")
    with pytest.raises(InputError) as err:
        read_raw_corpus(path)
    assert f"{path}:2" in str(err.value)


def test_raw_corpus_requires_text_field(tmp_path):
    path = tmp_path / "raw.jsonl"
    path.write_text('{"sentence_id": "X"}\n', encoding="utf-8")
    with pytest.raises(InputError) as err:
        read_raw_corpus(path)
    assert ":1" in str(err.value)


def test_parses_round_trip(tmp_path, sentences):
    cfg = ExtractorConfig()
    path = tmp_path / "parses.jsonl"
    write_parses(path, sentences, cfg)
    header, back = read_parses(path)
    assert header["format"] == "parses"
    assert header["schema_version"] == 1
    assert header["tool_version"] == __version__
    assert header["config_hash"] == config_hash(cfg)
    assert header["parser_model"] == cfg.parser_model
    assert back == sentences


def test_parses_reader_rejects_bad_pos(tmp_path, sentences):
    path = tmp_path / "parses.jsonl"
    write_parses(path, sentences, ExtractorConfig())
    lines = path.read_text(encoding="utf-8").splitlines()
    lines[1] = lines[1].replace('"pos":"VERB"', '"pos":"VRB"')
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    with pytest.raises(InputError) as err:
        read_parses(path)
    assert ":2" in str(err.value)


def test_mention_features_header_and_f32_round_trip(tmp_path):
    cfg = ExtractorConfig()
    record = {
        "mention_id": "F1:t2", "sentence_id": "F1", "token_index": 2,
        "term": "seize", "kind": "predicate",
        "embedding": np.full(3, 1.0 / 3.0, dtype=np.float32),
        "mwp": ["a", "b"],
    }
    path = tmp_path / "mentions.jsonl"
    write_mention_features(path, [record], d_emb=3, length=2, config=cfg)
    header = read_mention_header(path)
    assert header["d_emb"] == 3
    assert header["l"] == 2
    assert header["mlm_model"] == cfg.mlm_model
    lines = path.read_text(encoding="utf-8").splitlines()
    stored = json.loads(lines[1])["embedding"]
    assert [np.float32(v) for v in stored] == list(record["embedding"])
    assert all(float(np.float32(v)) == v for v in stored)


def test_mention_writer_rejects_wrong_dimension(tmp_path):
    record = {
        "mention_id": "x", "sentence_id": "x", "token_index": 0,
        "term": "t", "kind": "predicate",
        "embedding": np.zeros(4, dtype=np.float32), "mwp": ["a", "b"],
    }
    with pytest.raises(ValueError):
        write_mention_features(
            tmp_path / "m.jsonl", [record], d_emb=3, length=2, config=ExtractorConfig()
        )
    with pytest.raises(ValueError):
        write_mention_features(
            tmp_path / "m.jsonl", [record], d_emb=4, length=3, config=ExtractorConfig()
        )


def test_occurrence_reader_accepts_pipeline_file(data_dir):
    occurrences = read_occurrences(data_dir / "occurrences_sample.jsonl")
    assert len(occurrences) == 3
    assert occurrences[0]["predicate_lemma"] == "seize"
    assert occurrences[0]["object_head_index"] == 4


def test_occurrence_reader_rejects_missing_field(tmp_path, data_dir):
    lines = (data_dir / "occurrences_sample.jsonl").read_text(encoding="utf-8").splitlines()
    record = json.loads(lines[1])
    del record["object_head_index"]
    path = tmp_path / "occ.jsonl"
    path.write_text(lines[0] + "\n" + json.dumps(record) + "\n", encoding="utf-8")
    with pytest.raises(InputError) as err:
        read_occurrences(path)
    assert ":2" in str(err.value)


def test_occurrence_reader_rejects_wrong_format_header(tmp_path):
    path = tmp_path / "occ.jsonl"
    path.write_text('{"format":"parses","schema_version":1}\n', encoding="utf-8")
    with pytest.raises(InputError):
        read_occurrences(path)


def test_config_hash_stable_and_sensitive():
    a = ExtractorConfig()
    assert config_hash(a) == config_hash(ExtractorConfig())
    assert config_hash(a) != config_hash(ExtractorConfig(mwp_length=9))
    assert len(config_hash(a)) == 12
