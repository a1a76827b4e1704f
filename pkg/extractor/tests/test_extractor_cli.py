"""Command line surface: exit codes, outputs, determinism."""

import json
from pathlib import Path

import pytest

from evfeats.cli import main


def run(*argv):
    return main([str(a) for a in argv])


def read_jsonl(path):
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return json.loads(lines[0]), [json.loads(l) for l in lines[1:]]


def test_parse_corpus_fixture(data_dir, tmp_path):
    out = tmp_path / "parses.jsonl"
    assert run("parse", "--corpus", data_dir / "corpus.jsonl", "--out", out) == 0
    header, records = read_jsonl(out)
    assert header["format"] == "parses"
    assert header["schema_version"] == 1
    assert "config_hash" in header and "tool_version" in header
    assert [r["sentence_id"] for r in records] == ["F1", "F2", "F3", "F4", "F5"]
    for r in records:
        for t in r["tokens"]:
            assert set(t) == {"index", "text", "lemma", "pos", "dep_label", "head"}


def test_parse_empty_corpus_writes_header_only(tmp_path):
    corpus = tmp_path / "raw.jsonl"
    corpus.write_text("", encoding="utf-8")
    out = tmp_path / "parses.jsonl"
    assert run("parse", "--corpus", corpus, "--out", out) == 0
    header, records = read_jsonl(out)
    assert header["format"] == "parses"
    assert records == []


def test_parse_malformed_corpus_line_exits_2(tmp_path, capsys):
    corpus = tmp_path / "raw.jsonl"
    corpus.write_text('{"text": "ok"}\n{nope\n', encoding="utf-8")
    assert run("parse", "--corpus", corpus, "--out", tmp_path / "o.jsonl") == 2
    assert f"{corpus}:2" in capsys.readouterr().err


def test_parse_missing_corpus_exits_2(tmp_path):
    assert run("parse", "--corpus", tmp_path / "nope.jsonl", "--out", tmp_path / "o.jsonl") == 2


def test_parse_skipped_sentence_warns_but_succeeds(tmp_path, capsys):
    corpus = tmp_path / "raw.jsonl"
    corpus.write_text('{"sentence_id": "A", "text": "The lion ran."}\n'
                      '{"sentence_id": "B", "text": "?!"}\n', encoding="utf-8")
    out = tmp_path / "parses.jsonl"
    assert run("parse", "--corpus", corpus, "--out", out) == 0
    _, records = read_jsonl(out)
    assert [r["sentence_id"] for r in records] == ["A"]
    assert "B" in capsys.readouterr().err


def test_unknown_config_key_exits_2(data_dir, tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"window": 9}', encoding="utf-8")
    code = run("--config", cfg, "parse", "--corpus", data_dir / "corpus.jsonl",
               "--out", tmp_path / "o.jsonl")
    assert code == 2
    assert "window" in capsys.readouterr().err


def test_featurize_mentions(data_dir, tmp_path):
    parses = tmp_path / "parses.jsonl"
    assert run("parse", "--corpus", data_dir / "corpus.jsonl", "--out", parses) == 0
    out = tmp_path / "mentions.jsonl"
    assert run("featurize-mentions", "--parses", parses,
               "--occurrences", data_dir / "occurrences_sample.jsonl", "--out", out) == 0
    header, records = read_jsonl(out)
    assert header["format"] == "mention_features"
    assert header["d_emb"] == 64
    assert header["l"] == 10
    assert [r["mention_id"] for r in records] == ["F1:t2", "F1:t4", "F5:t2", "F5:t6"]
    assert [r["kind"] for r in records] == ["predicate", "object_head"] * 2
    assert [r["term"] for r in records] == ["seize", "mouse", "chase", "thief"]
    for r in records:
        assert len(r["embedding"]) == 64
        assert len(r["mwp"]) == 10 and len(set(r["mwp"])) == 10


def test_featurize_mentions_with_senses_appends_examples(data_dir, tmp_path):
    parses = tmp_path / "parses.jsonl"
    run("parse", "--corpus", data_dir / "corpus.jsonl", "--out", parses)
    out = tmp_path / "mentions.jsonl"
    assert run("featurize-mentions", "--parses", parses,
               "--occurrences", data_dir / "occurrences_sample.jsonl",
               "--senses", data_dir / "senses.json", "--out", out) == 0
    _, records = read_jsonl(out)
    kinds = [r["kind"] for r in records]
    assert kinds.count("sense_example") == 4
    tail = [r["mention_id"] for r in records if r["kind"] == "sense_example"]
    assert tail == ["seize_1#ex0", "seize_1#ex1", "seize_2#ex0", "see_1#ex0"]


def test_featurize_mentions_mismatched_parses_exits_2(data_dir, tmp_path, capsys):
    parses = tmp_path / "parses.jsonl"
    corpus = tmp_path / "raw.jsonl"
    corpus.write_text('{"sentence_id": "X", "text": "The lion ran."}\n', encoding="utf-8")
    run("parse", "--corpus", corpus, "--out", parses)
    code = run("featurize-mentions", "--parses", parses,
               "--occurrences", data_dir / "occurrences_sample.jsonl",
               "--out", tmp_path / "m.jsonl")
    assert code == 2
    assert "F1" in capsys.readouterr().err


def test_featurize_senses_standalone(data_dir, tmp_path):
    out = tmp_path / "sense_features.jsonl"
    assert run("featurize-senses", "--senses", data_dir / "senses.json", "--out", out) == 0
    header, records = read_jsonl(out)
    assert header["format"] == "mention_features"
    assert header["d_emb"] == 64 and header["l"] == 10
    assert [r["mention_id"] for r in records] == [
        "seize_1#ex0", "seize_1#ex1", "seize_2#ex0", "see_1#ex0",
    ]
    assert all(r["kind"] == "sense_example" for r in records)


def test_custom_mwp_length_via_config(data_dir, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"mwp_length": 4}', encoding="utf-8")
    out = tmp_path / "sf.jsonl"
    assert run("--config", cfg, "featurize-senses", "--senses", data_dir / "senses.json",
               "--out", out) == 0
    header, records = read_jsonl(out)
    assert header["l"] == 4
    assert all(len(r["mwp"]) == 4 for r in records)


def test_outputs_are_deterministic_across_runs(data_dir, tmp_path):
    for d in ("one", "two"):
        (tmp_path / d).mkdir()
        run("parse", "--corpus", data_dir / "corpus.jsonl", "--out", tmp_path / d / "p.jsonl")
        run("featurize-mentions", "--parses", tmp_path / d / "p.jsonl",
            "--occurrences", data_dir / "occurrences_sample.jsonl",
            "--senses", data_dir / "senses.json", "--out", tmp_path / d / "m.jsonl")
    for name in ("p.jsonl", "m.jsonl"):
        a = (tmp_path / "one" / name).read_bytes()
        b = (tmp_path / "two" / name).read_bytes()
        assert a == b
