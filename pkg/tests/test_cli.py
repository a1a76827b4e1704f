import json
import os
from pathlib import Path

import pytest

from evtypes.cli import RUN_ALL_FILES, main
from evtypes.formats import read_jsonl, read_pair_features, write_parses
from evtypes.salience import read_salient_words

DATA = Path(__file__).parent / "data"

TRAIN_SMALL = {
    "k": 5,
    "latent_dim": 16,
    "hidden": [64, 32],
    "pretrain_epochs": 5,
    "max_iters": 20,
    "batch_size": 8,
}


@pytest.fixture()
def config_path(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"seed": 42, "train": TRAIN_SMALL}))
    return str(path)


def run(*argv):
    return main([str(a) for a in argv])


# ----------------------------------------------------------------- extract


def test_extract_fixture_counts(tmp_path, config_path):
    occ = tmp_path / "occ.jsonl"
    pairs = tmp_path / "pairs.tsv"
    code = run(
        "--config", config_path, "extract",
        "--parses", DATA / "parses.jsonl",
        "--out-occurrences", occ, "--out-pairs", pairs,
    )
    assert code == 0
    header, rows = read_jsonl(occ, "po_occurrences")
    assert len(rows) == 22
    assert header["seed"] == 42
    assert header["tool_version"]
    assert header["config_hash"]
    table = pairs.read_text().splitlines()
    assert table[0].startswith("# format=pair_freq")
    data_rows = [l for l in table if not l.startswith("#")]
    assert data_rows[0] == "detain\tpeople\t2"


def test_extract_empty_corpus_is_empty_success(tmp_path, config_path):
    parses = tmp_path / "empty.jsonl"
    write_parses(parses, [], {"config_hash": "x", "seed": 0})
    occ = tmp_path / "occ.jsonl"
    pairs = tmp_path / "pairs.tsv"
    code = run(
        "--config", config_path, "extract",
        "--parses", parses, "--out-occurrences", occ, "--out-pairs", pairs,
    )
    assert code == 0
    _, rows = read_jsonl(occ, "po_occurrences")
    assert rows == []
    assert [l for l in pairs.read_text().splitlines() if not l.startswith("#")] == []


def test_extract_malformed_line_exits_2_with_line_number(tmp_path, config_path, capsys):
    parses = tmp_path / "bad.jsonl"
    good = (DATA / "parses.jsonl").read_text().splitlines()
    parses.write_text(good[0] + "\n" + good[1] + "\n{not json\n")
    code = run(
        "--config", config_path, "extract",
        "--parses", parses,
        "--out-occurrences", tmp_path / "o.jsonl", "--out-pairs", tmp_path / "p.tsv",
    )
    assert code == 2
    assert ":3:" in capsys.readouterr().err


def test_extract_missing_file_exits_2(tmp_path, config_path):
    code = run(
        "--config", config_path, "extract",
        "--parses", tmp_path / "nope.jsonl",
        "--out-occurrences", tmp_path / "o.jsonl", "--out-pairs", tmp_path / "p.tsv",
    )
    assert code == 2


# ------------------------------------------------------------------ select


@pytest.fixture()
def extracted(tmp_path, config_path):
    occ = tmp_path / "occ.jsonl"
    pairs = tmp_path / "pairs.tsv"
    assert run(
        "--config", config_path, "extract",
        "--parses", DATA / "parses.jsonl",
        "--out-occurrences", occ, "--out-pairs", pairs,
    ) == 0
    return occ, pairs


def test_select_fixture_vocabularies(tmp_path, config_path, extracted):
    _, pairs = extracted
    preds = tmp_path / "preds.tsv"
    heads = tmp_path / "heads.tsv"
    code = run(
        "--config", config_path, "select",
        "--pairs", pairs, "--background", DATA / "background.tsv",
        "--out-predicates", preds, "--out-heads", heads,
    )
    assert code == 0
    pred_words = read_salient_words(preds)
    head_words = read_salient_words(heads)
    assert len(pred_words) == 12
    assert len(head_words) == 17
    assert "become" not in pred_words and "build" not in pred_words
    for gone in ("problem", "final", "he", "that"):
        assert gone not in head_words
    assert "people" in head_words


def test_select_keep_fraction_one_keeps_everything(tmp_path, extracted):
    _, pairs = extracted
    config = tmp_path / "keepall.json"
    config.write_text(json.dumps({"seed": 42, "keep_fraction": 1.0, "train": TRAIN_SMALL}))
    preds = tmp_path / "p1.tsv"
    heads = tmp_path / "h1.tsv"
    assert run(
        "--config", config, "select",
        "--pairs", pairs, "--background", DATA / "background.tsv",
        "--out-predicates", preds, "--out-heads", heads,
    ) == 0
    assert len(read_salient_words(preds)) == 14
    assert len(read_salient_words(heads)) == 21


def test_select_missing_background_exits_2(tmp_path, config_path, extracted):
    _, pairs = extracted
    code = run(
        "--config", config_path, "select",
        "--pairs", pairs, "--background", tmp_path / "missing.tsv",
        "--out-predicates", tmp_path / "p.tsv", "--out-heads", tmp_path / "h.tsv",
    )
    assert code == 2


# ------------------------------------------------------------- disambiguate


def test_disambiguate_fixture_senses(tmp_path, config_path):
    out = tmp_path / "assign.jsonl"
    code = run(
        "--config", config_path, "disambiguate",
        "--mentions", DATA / "mention_features.jsonl",
        "--senses", DATA / "senses.json", "--out", out,
    )
    assert code == 0
    _, rows = read_jsonl(out, "sense_assignments")
    by_mention = {rec["mention_id"]: rec["sense_id"] for _, rec in rows}
    # the custody sense and the halt sense separate by context
    assert by_mention["S2:t1"] == "arrest_1"
    assert by_mention["S6:t6"] == "arrest_1"
    assert by_mention["S7:t2"] == "arrest_1"
    assert by_mention["S3:t2"] == "arrest_2"
    assert by_mention["S4:t2"] == "stop_1"
    assert by_mention["S5:t1"] == "stop_1"
    # single-sense lemma: every detain mention gets it
    for mid in ("S1:t1", "S16:t4", "S20:t1"):
        assert by_mention[mid] == "detain_1"
    # lemmas absent from the dictionary fall back to the catch-all sense
    assert by_mention["S10:t2"] == "send_0"
    assert by_mention["S11:t2"] == "become_0"


def test_disambiguate_catch_all_has_null_score(tmp_path, config_path):
    out = tmp_path / "assign.jsonl"
    run(
        "--config", config_path, "disambiguate",
        "--mentions", DATA / "mention_features.jsonl",
        "--senses", DATA / "senses.json", "--out", out,
    )
    _, rows = read_jsonl(out, "sense_assignments")
    for _, rec in rows:
        if rec["sense_id"].endswith("_0"):
            assert rec["score"] is None
        else:
            assert isinstance(rec["score"], float)


# ----------------------------------------------------- featurize + cluster


@pytest.fixture()
def pipeline_dir(tmp_path, config_path):
    out_dir = tmp_path / "pipe"
    code = run(
        "--config", config_path, "run-all",
        "--parses", DATA / "parses.jsonl",
        "--background", DATA / "background.tsv",
        "--mentions", DATA / "mention_features.jsonl",
        "--senses", DATA / "senses.json",
        "--out-dir", out_dir,
    )
    assert code == 0
    return out_dir


def test_featurize_fixture_pairs(pipeline_dir):
    header, pairs = read_pair_features(pipeline_dir / "pair_features.jsonl")
    assert len(pairs) == 16
    assert pairs[0].predicate_sense == "detain_1"
    assert pairs[0].object_head == "people"
    assert pairs[0].frequency == 2
    assert set(pairs[0].sentence_ids) == {"S1", "S20"}
    keys = {(p.predicate_sense, p.object_head) for p in pairs}
    assert ("arrest_1", "suspect") in keys
    assert ("arrest_2", "spread") in keys
    assert ("remain_0", "problem") not in keys
    assert header["dim_p"] == len(pairs[0].h_p)
    assert header["dim_o"] == len(pairs[0].h_o)


def test_cluster_report_structure(pipeline_dir):
    report = json.loads((pipeline_dir / "cluster_report.json").read_text())
    assert report["meta"]["format"] == "cluster_report"
    assert report["meta"]["seed"] == 42
    assert report["meta"]["k"] == 5
    assert len(report["clusters"]) == 5
    total = 0
    for cluster in report["clusters"]:
        for pair in cluster["pairs"]:
            assert set(pair) == {"predicate_sense", "object_head", "score", "frequency"}
        total += len(cluster["pairs"])
        assert cluster["example_sentence_ids"] == sorted(cluster["example_sentence_ids"])
    assert total == 16


def test_cluster_k1_single_cluster_report(tmp_path, pipeline_dir):
    config = tmp_path / "k1.json"
    config.write_text(json.dumps({"seed": 42, "train": {**TRAIN_SMALL, "k": 1}}))
    report_path = tmp_path / "k1_report.json"
    code = run(
        "--config", config, "cluster",
        "--pairs", pipeline_dir / "pair_features.jsonl",
        "--out-report", report_path,
    )
    assert code == 0
    report = json.loads(report_path.read_text())
    assert len(report["clusters"]) == 1
    assert len(report["clusters"][0]["pairs"]) == 16


def test_cluster_rerun_is_byte_identical(tmp_path, config_path, pipeline_dir):
    reports = []
    for name in ("a", "b"):
        report_path = tmp_path / f"rep_{name}.json"
        ckpt_path = tmp_path / f"ckpt_{name}"
        assert run(
            "--config", config_path, "cluster",
            "--pairs", pipeline_dir / "pair_features.jsonl",
            "--out-report", report_path, "--out-checkpoint", ckpt_path,
        ) == 0
        reports.append((report_path.read_bytes(), ckpt_path.read_bytes()))
    assert reports[0] == reports[1]


def test_run_all_equals_stage_composition(tmp_path, config_path, pipeline_dir):
    steps = tmp_path / "steps"
    steps.mkdir()
    occ = steps / "occurrences.jsonl"
    pairs = steps / "pair_freq.tsv"
    preds = steps / "salient_predicates.tsv"
    heads = steps / "salient_heads.tsv"
    assign = steps / "sense_assignments.jsonl"
    feats = steps / "pair_features.jsonl"
    report = steps / "cluster_report.json"
    ckpt = steps / "model.ckpt"
    c = ("--config", config_path)
    assert run(*c, "extract", "--parses", DATA / "parses.jsonl",
               "--out-occurrences", occ, "--out-pairs", pairs) == 0
    assert run(*c, "select", "--pairs", pairs, "--background", DATA / "background.tsv",
               "--out-predicates", preds, "--out-heads", heads) == 0
    assert run(*c, "disambiguate", "--mentions", DATA / "mention_features.jsonl",
               "--senses", DATA / "senses.json", "--out", assign) == 0
    assert run(*c, "featurize", "--occurrences", occ,
               "--mentions", DATA / "mention_features.jsonl", "--assignments", assign,
               "--salient-predicates", preds, "--salient-heads", heads, "--out", feats) == 0
    assert run(*c, "cluster", "--pairs", feats, "--out-report", report,
               "--out-checkpoint", ckpt) == 0
    for name in RUN_ALL_FILES.values():
        assert (steps / name).read_bytes() == (pipeline_dir / name).read_bytes(), name


# ---------------------------------------------------------------- evaluate


def test_evaluate_identical_labels_all_ones(tmp_path, config_path):
    labels = tmp_path / "labels.txt"
    labels.write_text("0\n0\n1\n1\n2\n")
    out = tmp_path / "metrics.json"
    code = run(
        "--config", config_path, "evaluate",
        "--predicted", labels, "--reference", labels, "--out", out,
    )
    assert code == 0
    report = json.loads(out.read_text())
    for key in ("ari", "nmi", "bcubed_p", "bcubed_r", "bcubed_f1", "acc"):
        assert report[key] == 1.0, key


def test_evaluate_json_label_maps(tmp_path, config_path, capsys):
    pred = tmp_path / "pred.json"
    ref = tmp_path / "ref.json"
    pred.write_text(json.dumps({"a": 0, "b": 1, "c": 1, "d": 0}))
    ref.write_text(json.dumps({"a": 1, "b": 0, "c": 0, "d": 1}))
    code = run("--config", config_path, "evaluate", "--predicted", pred, "--reference", ref)
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["acc"] == 1.0
    assert report["nmi"] == 1.0


def test_evaluate_length_mismatch_exits_2(tmp_path, config_path):
    pred = tmp_path / "pred.txt"
    ref = tmp_path / "ref.txt"
    pred.write_text("0\n1\n")
    ref.write_text("0\n1\n1\n")
    assert run("--config", config_path, "evaluate", "--predicted", pred, "--reference", ref) == 2


# ------------------------------------------------------- config & seeding


def test_seed_precedence_flag_env_config(tmp_path, config_path, monkeypatch):
    def header_seed(occ_path, *argv):
        assert run(*argv) == 0
        header, _ = read_jsonl(occ_path, "po_occurrences")
        return header["seed"]

    base = (
        "extract", "--parses", DATA / "parses.jsonl",
        "--out-pairs", tmp_path / "p.tsv",
    )
    monkeypatch.delenv("EVTYPES_SEED", raising=False)
    occ = tmp_path / "o1.jsonl"
    assert header_seed(occ, "--config", config_path, *base, "--out-occurrences", occ) == 42

    monkeypatch.setenv("EVTYPES_SEED", "7")
    occ = tmp_path / "o2.jsonl"
    assert header_seed(occ, "--config", config_path, *base, "--out-occurrences", occ) == 7

    occ = tmp_path / "o3.jsonl"
    assert header_seed(
        occ, "--config", config_path, "--seed", "13", *base, "--out-occurrences", occ
    ) == 13


def test_bad_env_seed_exits_2(tmp_path, config_path, monkeypatch):
    monkeypatch.setenv("EVTYPES_SEED", "not-a-number")
    code = run(
        "--config", config_path, "extract",
        "--parses", DATA / "parses.jsonl",
        "--out-occurrences", tmp_path / "o.jsonl", "--out-pairs", tmp_path / "p.tsv",
    )
    assert code == 2


def test_unknown_config_key_exits_2(tmp_path):
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({"seed": 1, "kappa": 10}))
    code = run(
        "--config", config, "extract",
        "--parses", DATA / "parses.jsonl",
        "--out-occurrences", tmp_path / "o.jsonl", "--out-pairs", tmp_path / "p.tsv",
    )
    assert code == 2


def test_train_seed_in_config_is_rejected(tmp_path):
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({"seed": 1, "train": {"k": 2, "seed": 5}}))
    code = run(
        "--config", config, "extract",
        "--parses", DATA / "parses.jsonl",
        "--out-occurrences", tmp_path / "o.jsonl", "--out-pairs", tmp_path / "p.tsv",
    )
    assert code == 2


def test_missing_required_input_exits_2(tmp_path, config_path):
    code = run(
        "--config", config_path, "run-all",
        "--background", DATA / "background.tsv",
        "--mentions", DATA / "mention_features.jsonl",
        "--senses", DATA / "senses.json",
        "--out-dir", tmp_path / "out",
    )
    assert code == 2


def test_every_output_carries_metadata(pipeline_dir):
    for name in ("occurrences.jsonl", "sense_assignments.jsonl", "pair_features.jsonl"):
        header, _ = read_jsonl(pipeline_dir / name, Path(name).stem.replace("occurrences", "po_occurrences"))
        assert header["tool_version"]
        assert header["config_hash"]
        assert header["seed"] == 42
    for name in ("pair_freq.tsv", "salient_predicates.tsv", "salient_heads.tsv"):
        text = (pipeline_dir / name).read_text()
        assert "# tool_version=" in text
        assert "# config_hash=" in text
        assert "# seed=42" in text
    report = json.loads((pipeline_dir / "cluster_report.json").read_text())
    assert report["meta"]["tool_version"]
    assert report["meta"]["config_hash"]
    assert report["meta"]["seed"] == 42
